use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let result = aifm::cli::dispatch(std::env::args_os());
    let mut out = std::io::stdout().lock();
    let text = result.text.clone().unwrap_or_else(|| result.render());
    let _ = out.write_all(text.as_bytes());
    if result.code != 0 {
        if let Some(msg) = result.body.get("message").and_then(|m| m.as_str()) {
            eprintln!("aifm: {msg}");
        }
    }
    ExitCode::from(result.code as u8)
}
