//! Interchange formats for grids and vector floorplans.
//!
//! - run-length text format for label maps (stable, diff-friendly fixtures)
//! - PNG export with a palette hashed from labels
//! - floorplan JSON: rooms as vertex rings in world units plus a frame

use super::raster::Frame;
use super::{GeometryError, GridLabelMap, GridPoint, Label, OrthoPolygon};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use thiserror::Error;

pub const RLE_MAGIC: &str = "mansion-rle";
pub const RLE_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("bad run-length header: {0}")]
    BadHeader(String),
    #[error("bad run-length token '{0}'")]
    BadToken(String),
    #[error("run-length payload covers {got} cells, expected {want}")]
    BadLength { got: usize, want: usize },
    #[error("floorplan room '{id}': {source}")]
    BadRoom {
        id: String,
        source: GeometryError,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn label_token(label: Label) -> String {
    match label {
        Label::Exterior => "E".to_string(),
        Label::Empty => ".".to_string(),
        Label::Core(k) => format!("C{k}"),
        Label::Room(r) => format!("R{r}"),
    }
}

fn parse_label(tok: &str) -> Result<Label, FormatError> {
    match tok {
        "E" => Ok(Label::Exterior),
        "." => Ok(Label::Empty),
        _ => {
            let (head, rest) = tok.split_at(1);
            let n: u32 = rest.parse().map_err(|_| FormatError::BadToken(tok.into()))?;
            match head {
                "C" => Ok(Label::Core(n)),
                "R" => Ok(Label::Room(n)),
                _ => Err(FormatError::BadToken(tok.into())),
            }
        }
    }
}

/// Encodes a label map as run-length text, row-major from the origin cell.
pub fn encode_rle(map: &GridLabelMap) -> String {
    let (ox, oy) = map.origin();
    let mut out = format!(
        "{RLE_MAGIC} {RLE_VERSION} {} {} {} {}\n",
        map.width(),
        map.height(),
        ox,
        oy
    );
    let cells = map.cells();
    let mut i = 0;
    let mut col = 0;
    while i < cells.len() {
        let label = cells[i];
        let mut run = 1;
        while i + run < cells.len() && cells[i + run] == label {
            run += 1;
        }
        let tok = format!("{}x{}", label_token(label), run);
        if col + tok.len() + 1 > 76 && col > 0 {
            out.push('\n');
            col = 0;
        } else if col > 0 {
            out.push(' ');
            col += 1;
        }
        col += tok.len();
        out.push_str(&tok);
        i += run;
    }
    out.push('\n');
    out
}

pub fn decode_rle(text: &str) -> Result<GridLabelMap, FormatError> {
    let mut tokens = text.split_whitespace();
    let magic = tokens.next().unwrap_or("");
    if magic != RLE_MAGIC {
        return Err(FormatError::BadHeader(format!("magic '{magic}'")));
    }
    let mut head = |name: &str| -> Result<i64, FormatError> {
        tokens
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| FormatError::BadHeader(name.to_string()))
    };
    let version = head("version")?;
    if version != RLE_VERSION as i64 {
        return Err(FormatError::BadHeader(format!("version {version}")));
    }
    let width = head("width")? as u32;
    let height = head("height")? as u32;
    let ox = head("origin_x")?;
    let oy = head("origin_y")?;
    if width == 0 || height == 0 {
        return Err(FormatError::BadHeader("zero dimension".into()));
    }
    let want = (width as usize) * (height as usize);
    let mut cells = Vec::with_capacity(want);
    for tok in tokens {
        let (label_part, count_part) = tok
            .rsplit_once('x')
            .ok_or_else(|| FormatError::BadToken(tok.into()))?;
        let label = parse_label(label_part)?;
        let count: usize = count_part
            .parse()
            .map_err(|_| FormatError::BadToken(tok.into()))?;
        cells.extend(std::iter::repeat_n(label, count));
    }
    if cells.len() != want {
        return Err(FormatError::BadLength {
            got: cells.len(),
            want,
        });
    }
    let mut map = GridLabelMap::filled(width, height, Label::Exterior).with_origin(ox, oy);
    for (i, l) in cells.into_iter().enumerate() {
        map.set_idx(i, l);
    }
    Ok(map)
}

fn splitmix64(mut v: u64) -> u64 {
    v = v.wrapping_add(0x9e3779b97f4a7c15);
    v = (v ^ (v >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    v = (v ^ (v >> 27)).wrapping_mul(0x94d049bb133111eb);
    v ^ (v >> 31)
}

/// Stable color for a label. Exterior and free interior get fixed neutral
/// tones; rooms and cores hash their id into a mid-range RGB triple.
pub fn label_color(label: Label) -> [u8; 3] {
    match label {
        Label::Exterior => [255, 255, 255],
        Label::Empty => [232, 232, 232],
        Label::Core(k) => hash_color(0x10_0000u64 + k as u64),
        Label::Room(r) => hash_color(0x20_0000u64 + r as u64),
    }
}

fn hash_color(code: u64) -> [u8; 3] {
    let h = splitmix64(code);
    let spread = |b: u8| 48 + (b as u32 * 160 / 255) as u8;
    [
        spread((h & 0xff) as u8),
        spread(((h >> 8) & 0xff) as u8),
        spread(((h >> 16) & 0xff) as u8),
    ]
}

/// Renders the map as PNG rows top-down (row 0 of the image is the highest
/// map row), one pixel per cell.
pub fn encode_png(map: &GridLabelMap) -> Vec<u8> {
    let mut img = image::RgbImage::new(map.width(), map.height());
    for y in 0..map.height() {
        for x in 0..map.width() {
            let label = map.get(x, map.height() - 1 - y);
            img.put_pixel(x, y, image::Rgb(label_color(label)));
        }
    }
    let mut bytes = Vec::new();
    image::DynamicImage::ImageRgb8(img)
        .write_to(&mut std::io::Cursor::new(&mut bytes), image::ImageFormat::Png)
        .expect("png encoding is infallible for in-memory buffers");
    bytes
}

/// Vector floorplan document: a frame plus rooms as vertex rings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FloorplanDoc {
    pub frame: FrameSpec,
    pub rooms: Vec<RoomPoly>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub doors: Vec<DoorSpec>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FrameSpec {
    pub x: [f64; 2],
    pub y: [f64; 2],
}

impl From<FrameSpec> for Frame {
    fn from(f: FrameSpec) -> Frame {
        Frame::new(f.x[0], f.y[0], f.x[1], f.y[1])
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RoomPoly {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub category: Option<String>,
    pub vertices: Vec<[i64; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DoorSpec {
    pub rooms: [String; 2],
    pub position: [f64; 2],
    pub orientation: String,
}

impl FloorplanDoc {
    pub fn from_json(text: &str) -> Result<Self, FormatError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("floorplan serializes")
    }

    /// Room polygons in declaration order, indexed by position, with the
    /// category of each (defaulting to the room id).
    pub fn polygons(&self) -> Result<Vec<(u32, OrthoPolygon, String)>, FormatError> {
        self.rooms
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let verts = r.vertices.iter().map(|v| GridPoint::new(v[0], v[1])).collect();
                let poly = OrthoPolygon::new(verts).map_err(|source| FormatError::BadRoom {
                    id: r.id.clone(),
                    source,
                })?;
                let cat = r.category.clone().unwrap_or_else(|| r.id.clone());
                Ok((i as u32, poly, cat))
            })
            .collect()
    }

    pub fn frame(&self) -> Frame {
        self.frame.into()
    }
}

/// Free-region document: footprint ring plus core boxes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegionDoc {
    pub footprint: Vec<[i64; 2]>,
    #[serde(default)]
    pub cores: Vec<RegionCore>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegionCore {
    pub id: String,
    pub kind: super::CoreKind,
    pub x: [i64; 2],
    pub y: [i64; 2],
}

impl RegionDoc {
    pub fn from_json(text: &str) -> Result<Self, FormatError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("region serializes")
    }

    pub fn to_region(&self) -> Result<super::FreeRegion, GeometryError> {
        let footprint = OrthoPolygon::new(
            self.footprint
                .iter()
                .map(|v| GridPoint::new(v[0], v[1]))
                .collect(),
        )?;
        let cores = self
            .cores
            .iter()
            .map(|c| super::CoreBox {
                id: c.id.clone(),
                kind: c.kind,
                rect: super::GridRect::new(c.x[0], c.y[0], c.x[1], c.y[1]),
            })
            .collect();
        super::FreeRegion::new(footprint, cores)
    }

    pub fn from_region(region: &super::FreeRegion) -> Self {
        Self {
            footprint: region
                .footprint()
                .vertices()
                .iter()
                .map(|p| [p.x, p.y])
                .collect(),
            cores: region
                .cores()
                .iter()
                .map(|c| RegionCore {
                    id: c.id.clone(),
                    kind: c.kind,
                    x: [c.rect.x0, c.rect.x1],
                    y: [c.rect.y0, c.rect.y1],
                })
                .collect(),
        }
    }
}

/// Minimal SVG sheet for a label map: one path per room plus hatched cores.
pub fn map_to_svg(map: &GridLabelMap, room_names: &[String], core_names: &[String]) -> String {
    let mut room_labels: Vec<u32> = map
        .cells()
        .iter()
        .filter_map(|l| match l {
            Label::Room(r) => Some(*r),
            _ => None,
        })
        .collect();
    room_labels.sort_unstable();
    room_labels.dedup();
    let mut core_labels: Vec<u32> = map
        .cells()
        .iter()
        .filter_map(|l| match l {
            Label::Core(k) => Some(*k),
            _ => None,
        })
        .collect();
    core_labels.sort_unstable();
    core_labels.dedup();

    let (ox, oy) = map.origin();
    let w = map.width();
    let h = map.height();
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{ox} {} {w} {h}\" width=\"{}\" height=\"{}\">",
        -(oy + h as i64),
        w * 8,
        h * 8
    );
    let _ = writeln!(svg, "  <g stroke=\"#333\" stroke-width=\"0.06\">");
    let mut emit_label = |label: Label, name: &str, fill: [u8; 3], hatch: bool| {
        let loops = super::contour::trace_label_contours(map, label);
        if loops.is_empty() {
            return;
        }
        let mut d = String::new();
        for lp in &loops {
            for (i, p) in lp.iter().enumerate() {
                let cmd = if i == 0 { 'M' } else { 'L' };
                let _ = write!(d, "{cmd}{} {} ", p.x, -p.y);
            }
            d.push_str("Z ");
        }
        let style = if hatch {
            "fill:#bbb;fill-opacity:0.9".to_string()
        } else {
            format!("fill:rgb({},{},{})", fill[0], fill[1], fill[2])
        };
        let _ = writeln!(
            svg,
            "    <path d=\"{}\" style=\"{}\" fill-rule=\"evenodd\"><title>{}</title></path>",
            d.trim_end(),
            style,
            name
        );
        // label at the centroid of the label's cells
        let cells = map.cells_with(label);
        if !cells.is_empty() {
            let mut cx = 0.0;
            let mut cy = 0.0;
            for &c in &cells {
                let (x, y) = map.coords(c);
                cx += ox as f64 + x as f64 + 0.5;
                cy += oy as f64 + y as f64 + 0.5;
            }
            cx /= cells.len() as f64;
            cy /= cells.len() as f64;
            let _ = writeln!(
                svg,
                "    <text x=\"{cx:.2}\" y=\"{:.2}\" font-size=\"0.7\" text-anchor=\"middle\" stroke=\"none\" fill=\"#111\">{name}</text>",
                -cy + 0.25
            );
        }
    };
    for r in room_labels {
        let name = room_names
            .get(r as usize)
            .cloned()
            .unwrap_or_else(|| format!("room_{r}"));
        emit_label(Label::Room(r), &name, label_color(Label::Room(r)), false);
    }
    for k in core_labels {
        let name = core_names
            .get(k as usize)
            .cloned()
            .unwrap_or_else(|| format!("core_{k}"));
        emit_label(Label::Core(k), &name, label_color(Label::Core(k)), true);
    }
    svg.push_str("  </g>\n</svg>\n");
    svg
}
