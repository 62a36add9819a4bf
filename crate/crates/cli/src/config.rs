//! `--config FILE` support: `key = value` lines become flags placed before
//! the command-line flags, so explicit flags win.

use clap::Command;

pub fn splice(mut args: Vec<String>, cmd: &Command) -> Result<Vec<String>, String> {
    let mut path = None;
    let mut i = 1;
    while i < args.len() {
        if args[i] == "--config" {
            if i + 1 >= args.len() {
                return Err("--config needs a file".into());
            }
            path = Some(args.remove(i + 1));
            args.remove(i);
        } else if let Some(p) = args[i].strip_prefix("--config=") {
            path = Some(p.to_string());
            args.remove(i);
        } else {
            i += 1;
        }
    }
    let Some(path) = path else { return Ok(args) };
    let text = std::fs::read_to_string(&path).map_err(|e| format!("{path}: {e}"))?;
    let flags = parse_lines(&text)?;
    let names: Vec<&str> = cmd.get_subcommands().map(|s| s.get_name()).collect();
    let at = args
        .iter()
        .position(|a| names.contains(&a.as_str()))
        .ok_or_else(|| "--config needs a subcommand".to_string())?;
    args.splice(at + 1..at + 1, flags);
    Ok(args)
}

fn parse_lines(text: &str) -> Result<Vec<String>, String> {
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| format!("line {}: expected key = value", no + 1))?;
        let key = k.trim().replace('_', "-");
        match v.trim() {
            "true" => out.push(format!("--{key}")),
            "false" => {}
            v => out.push(format!("--{key}={v}")),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lines_become_flags() {
        let f = parse_lines("# comment\nx_min = -2\nfast = true\nquiet = false\n").unwrap();
        assert_eq!(f, vec!["--x-min=-2", "--fast"]);
        assert!(parse_lines("nonsense").is_err());
    }
}
