//! Plain-text rendering of steps for the `run` subcommand.

use std::fmt::Write;

use tilepad::interpreter::{Scene, StepOutput};
use tilepad::Mode;

pub fn render_scene(scene: &Scene) -> String {
    match scene.mode() {
        Mode::Sandbox => scene.world().render_ascii(),
        Mode::Maze => match scene.maze_run() {
            Some(run) => run.maze().render(run.pose(), run.trajectory()),
            None => "(no maze loaded)".to_string(),
        },
        Mode::Math => {
            let equation = scene
                .equation()
                .map_or_else(|| "?".to_string(), |e| e.to_string());
            let answer = scene
                .math_state()
                .and_then(|s| s.answer())
                .map_or_else(|| "?".to_string(), |a| a.to_string());
            format!("{equation} = {answer}")
        }
    }
}

/// One block per step: header, events, diagnostics, fact, then the scene.
pub fn format_step(step: &StepOutput, scene: &Scene) -> String {
    let mut out = String::new();
    writeln!(out, "== step {} ==", step.seq).unwrap();
    for event in &step.events {
        writeln!(out, "event: {event}").unwrap();
    }
    for diag in &step.diagnostics {
        writeln!(out, "diagnostic: {diag}").unwrap();
    }
    if let Some(fact) = &step.fact {
        writeln!(out, "fact: {}", fact.body).unwrap();
    }
    writeln!(out, "{}", render_scene(scene)).unwrap();
    out
}
