//! `mansion scene`: one-shot scene queries and the line-delimited serve
//! loop. One-shot failures (unknown rooms or objects) are validation
//! errors; in serve mode they become structured error responses instead.

use super::read_text;
use crate::{CliError, SceneAction};
use mansion_core::scenequery::{
    check_path, check_surface, list_objects, protocol, search_contents, SceneDoc,
};
use std::path::Path;

fn load(doc: &Path) -> Result<SceneDoc, CliError> {
    SceneDoc::from_json(&read_text(doc)?).map_err(|e| CliError::Parse(e.to_string()))
}

pub fn run(action: SceneAction) -> Result<(), CliError> {
    match action {
        SceneAction::CheckPath { doc, from, to } => {
            let doc = load(&doc)?;
            let result = check_path(&doc, &from, &to).map_err(|e| CliError::Parse(e.to_string()))?;
            println!("{}", serde_json::to_string_pretty(&result).unwrap());
            Ok(())
        }
        SceneAction::CheckSurface { doc, target } => {
            let doc = load(&doc)?;
            let on_top = check_surface(&doc, &target).map_err(|e| CliError::Parse(e.to_string()))?;
            println!("{}", serde_json::json!({ "on_top": on_top }));
            Ok(())
        }
        SceneAction::SearchContents { doc, container } => {
            let doc = load(&doc)?;
            let contents =
                search_contents(&doc, &container).map_err(|e| CliError::Parse(e.to_string()))?;
            println!("{}", serde_json::json!({ "contents": contents }));
            Ok(())
        }
        SceneAction::List { doc, room, keyword } => {
            let doc = load(&doc)?;
            let listing = list_objects(&doc, room.as_deref(), keyword.as_deref())
                .map_err(|e| CliError::Parse(e.to_string()))?;
            println!("{}", serde_json::to_string_pretty(&listing).unwrap());
            Ok(())
        }
        SceneAction::Serve { doc, save } => {
            let mut scene = load(&doc)?;
            let stdin = std::io::stdin();
            let stdout = std::io::stdout();
            protocol::serve(&mut scene, stdin.lock(), stdout.lock())?;
            if let Some(path) = save {
                std::fs::write(path, scene.to_json())?;
            }
            Ok(())
        }
    }
}
