//! Writes the built-in problem presets as JSON files into the given directory.

use statphase::problem::{InitialDataDoc, ProblemDoc};

fn main() -> std::io::Result<()> {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "problems".into());
    std::fs::create_dir_all(&dir)?;
    let docs = [
        ("linear", ProblemDoc::linear()),
        ("fresnel", ProblemDoc::fresnel()),
        ("singular", ProblemDoc::singular(0.5)),
        ("intro", ProblemDoc::singular_intro(0.75)),
    ];
    for (name, doc) in docs {
        std::fs::write(format!("{dir}/{name}.json"), doc.to_json() + "\n")?;
    }
    let data = serde_json::to_string_pretty(&InitialDataDoc::intro(0.75)).expect("serializable");
    std::fs::write(format!("{dir}/intro_data.json"), data + "\n")
}
