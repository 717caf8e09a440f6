//! Line-delimited request/response protocol for driving scene queries from
//! an external controller: one JSON request per line, one JSON response per
//! line, the request id echoed in every response.

use super::provision::{place_in_container, place_on_surface, remove_object, AssetExtent};
use super::{check_path, check_surface, list_objects, search_contents, SceneDoc};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

#[derive(Debug, Deserialize)]
pub struct ToolRequest {
    #[serde(default)]
    pub id: Option<Value>,
    pub tool: String,
    #[serde(default)]
    pub args: Value,
}

#[derive(Debug, Serialize)]
pub struct ToolResponse {
    pub id: Value,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

fn arg_str<'a>(args: &'a Value, key: &str) -> Result<&'a str, String> {
    args.get(key)
        .and_then(|v| v.as_str())
        .ok_or_else(|| format!("missing string argument '{key}'"))
}

fn arg_f64(args: &Value, key: &str) -> Result<f64, String> {
    args.get(key)
        .and_then(|v| v.as_f64())
        .ok_or_else(|| format!("missing numeric argument '{key}'"))
}

/// Executes one request against the document. Edits replace the document in
/// place (single-writer contract); queries leave it untouched.
pub fn handle_request(doc: &mut SceneDoc, line: &str) -> ToolResponse {
    let request: ToolRequest = match serde_json::from_str(line) {
        Ok(r) => r,
        Err(e) => {
            return ToolResponse {
                id: Value::Null,
                ok: false,
                result: None,
                error: Some(format!("bad request: {e}")),
            }
        }
    };
    let id = request.id.clone().unwrap_or(Value::Null);
    match dispatch(doc, &request) {
        Ok(result) => ToolResponse {
            id,
            ok: true,
            result: Some(result),
            error: None,
        },
        Err(message) => ToolResponse {
            id,
            ok: false,
            result: None,
            error: Some(message),
        },
    }
}

fn dispatch(doc: &mut SceneDoc, request: &ToolRequest) -> Result<Value, String> {
    let args = &request.args;
    match request.tool.as_str() {
        "check_path" => {
            let from = arg_str(args, "from")?;
            let to = arg_str(args, "to")?;
            let r = check_path(doc, from, to).map_err(|e| e.to_string())?;
            Ok(serde_json::to_value(r).unwrap())
        }
        "check_surface" => {
            let target = arg_str(args, "keyword").or_else(|_| arg_str(args, "id"))?;
            let r = check_surface(doc, target).map_err(|e| e.to_string())?;
            Ok(json!({ "on_top": r }))
        }
        "search_contents" => {
            let target = arg_str(args, "keyword").or_else(|_| arg_str(args, "id"))?;
            let r = search_contents(doc, target).map_err(|e| e.to_string())?;
            Ok(json!({ "contents": r }))
        }
        "list_objects" => {
            let room = args.get("room").and_then(|v| v.as_str());
            let keyword = args.get("keyword").and_then(|v| v.as_str());
            let r = list_objects(doc, room, keyword).map_err(|e| e.to_string())?;
            Ok(serde_json::to_value(r).unwrap())
        }
        "place_in_container" | "place_on_surface" => {
            let asset = arg_str(args, "asset")?;
            let new_id = arg_str(args, "new_id")?;
            let target = arg_str(args, "target")?;
            let extent = AssetExtent {
                width: arg_f64(args, "width")?,
                height: arg_f64(args, "height")?,
                depth: arg_f64(args, "depth")?,
            };
            let next = if request.tool == "place_in_container" {
                place_in_container(doc, asset, new_id, target, extent)
            } else {
                place_on_surface(doc, asset, new_id, target, extent)
            }
            .map_err(|e| e.to_string())?;
            *doc = next;
            Ok(json!({ "placed": new_id }))
        }
        "remove_object" => {
            let object_id = args.get("object_id").and_then(|v| v.as_str());
            let receptacle_id = args.get("receptacle_id").and_then(|v| v.as_str());
            let next = remove_object(doc, object_id, receptacle_id).map_err(|e| e.to_string())?;
            let removed = doc.objects.len() - next.objects.len();
            *doc = next;
            Ok(json!({ "removed": removed }))
        }
        other => Err(format!("unknown tool '{other}'")),
    }
}

/// Serves requests line by line until EOF, writing one response per line.
pub fn serve<R: std::io::BufRead, W: std::io::Write>(
    doc: &mut SceneDoc,
    reader: R,
    mut writer: W,
) -> std::io::Result<()> {
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let response = handle_request(doc, &line);
        serde_json::to_writer(&mut writer, &response)?;
        writeln!(writer)?;
        writer.flush()?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn responses_echo_request_ids() {
        let mut doc = super::super::tests::two_floor_doc();
        let input = concat!(
            r#"{"id": "q1", "tool": "check_path", "args": {"from": "lobby", "to": "office"}}"#,
            "\n",
            r#"{"id": 7, "tool": "list_objects", "args": {"keyword": "mug"}}"#,
            "\n",
            r#"{"id": "q3", "tool": "check_path", "args": {"from": "lobby", "to": "nowhere"}}"#,
            "\n",
        );
        let mut output = Vec::new();
        serve(&mut doc, input.as_bytes(), &mut output).unwrap();
        let lines: Vec<Value> = String::from_utf8(output)
            .unwrap()
            .lines()
            .map(|l| serde_json::from_str(l).unwrap())
            .collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0]["id"], "q1");
        assert_eq!(lines[0]["ok"], true);
        assert_eq!(lines[0]["result"]["reachable"], true);
        assert_eq!(lines[1]["id"], 7);
        assert_eq!(lines[2]["id"], "q3");
        assert_eq!(lines[2]["ok"], false);
        assert!(lines[2]["error"].as_str().unwrap().contains("nowhere"));
    }

    #[test]
    fn edits_persist_across_requests() {
        let mut doc = super::super::tests::two_floor_doc();
        let place = r#"{"id": 1, "tool": "place_in_container",
            "args": {"asset": "snack_bar", "new_id": "snack_1", "target": "fridge_1",
                     "width": 0.1, "height": 0.05, "depth": 0.1}}"#;
        let response = handle_request(&mut doc, place);
        assert!(response.ok, "{:?}", response.error);
        let check = r#"{"id": 2, "tool": "search_contents", "args": {"id": "fridge_1"}}"#;
        let response = handle_request(&mut doc, check);
        let contents = response.result.unwrap();
        let list: Vec<String> =
            serde_json::from_value(contents["contents"].clone()).unwrap();
        assert!(list.contains(&"snack_1".to_string()));
    }
}
