//! `key = value` config files and flag value parsers.

use std::fs;

/// Splices the entries of `--config FILE` into the argument list right after
/// the subcommand, so that flags given on the command line win.
pub fn expand_config(args: Vec<String>) -> Result<Vec<String>, String> {
    let mut rest = Vec::with_capacity(args.len());
    let mut path = None;
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            path = Some(it.next().ok_or("--config needs a file path")?);
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else {
            rest.push(a);
        }
    }
    let Some(path) = path else {
        return Ok(rest);
    };
    let text = fs::read_to_string(&path).map_err(|e| format!("cannot read config {path}: {e}"))?;
    let entries = parse_config(&text)?;
    let Some(pos) = rest.iter().skip(1).position(|a| !a.starts_with('-')).map(|p| p + 1) else {
        return Err("--config given without a subcommand".into());
    };
    let mut flags = Vec::new();
    for (k, v) in entries {
        match v.as_str() {
            "true" => flags.push(format!("--{k}")),
            "false" => {}
            _ => flags.push(format!("--{k}={v}")),
        }
    }
    rest.splice(pos + 1..pos + 1, flags);
    Ok(rest)
}

pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| format!("config line {}: expected key = value", no + 1))?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() || k.contains(char::is_whitespace) {
            return Err(format!("config line {}: bad key {k:?}", no + 1));
        }
        out.push((k.to_string(), v.to_string()));
    }
    Ok(out)
}

pub fn parse_radius(s: &str) -> Result<f64, String> {
    let r: f64 = s.parse().map_err(|_| format!("not a number: {s}"))?;
    if !(r > 1.0 && r.is_finite()) {
        return Err(format!("outer radius must be > 1, got {s}"));
    }
    Ok(r)
}

pub fn parse_temperature(s: &str) -> Result<f64, String> {
    let t: f64 = s.parse().map_err(|_| format!("not a number: {s}"))?;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(format!("t must be >= 0, got {s}"));
    }
    Ok(t)
}

pub fn parse_positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("not a number: {s}"))?;
    if !(v > 0.0 && v.is_finite()) {
        return Err(format!("expected a positive number, got {s}"));
    }
    Ok(v)
}

pub fn parse_nodes(s: &str) -> Result<usize, String> {
    let n: usize = s.parse().map_err(|_| format!("not an integer: {s}"))?;
    if n < 17 {
        return Err(format!("need at least 17 radial nodes, got {n}"));
    }
    Ok(n)
}

/// `NRxNTHxNPH`, e.g. `48x24x48`.
pub fn parse_shape(s: &str) -> Result<(usize, usize, usize), String> {
    let v: Vec<usize> = s
        .split('x')
        .map(|p| p.trim().parse::<usize>().map_err(|_| format!("bad grid shape {s:?}, expected NRxNTxNP")))
        .collect::<Result<_, _>>()?;
    match v[..] {
        [a, b, c] if a >= 4 && b >= 4 && c >= 4 => Ok((a, b, c)),
        [_, _, _] => Err(format!("grid shape {s} too small (each dimension >= 4)")),
        _ => Err(format!("bad grid shape {s:?}, expected NRxNTxNP")),
    }
}

/// A sampling range `start:end:count`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Range {
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

impl Range {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        (0..self.count)
            .map(|i| self.start + (self.end - self.start) * i as f64 / (self.count - 1) as f64)
            .collect()
    }
}

pub fn parse_range(s: &str) -> Result<Range, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, n] = parts[..] else {
        return Err(format!("bad range {s:?}, expected start:end:count"));
    };
    let start: f64 = a.trim().parse().map_err(|_| format!("bad range start in {s:?}"))?;
    let end: f64 = b.trim().parse().map_err(|_| format!("bad range end in {s:?}"))?;
    let count: usize = n.trim().parse().map_err(|_| format!("bad range count in {s:?}"))?;
    if count == 0 || !start.is_finite() || !end.is_finite() || end < start {
        return Err(format!("bad range {s:?}: need start <= end and count >= 1"));
    }
    Ok(Range { start, end, count })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sv(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn config_entries_precede_flags() {
        let dir = std::env::temp_dir().join(format!("hh-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join("run.cfg");
        std::fs::write(&p, "# comment\nR = 1.7\nt=5 # inline\nallow-nonconverged = true\nquiet=false\n").unwrap();
        let out = expand_config(sv(&["hedgehog", "--config", p.to_str().unwrap(), "solve", "--t", "9"])).unwrap();
        assert_eq!(out, sv(&["hedgehog", "solve", "--R=1.7", "--t=5", "--allow-nonconverged", "--t", "9"]));
    }

    #[test]
    fn malformed_config() {
        assert!(parse_config("R 1.5").is_err());
        assert!(parse_config("= 3").is_err());
        assert_eq!(parse_config("\n  # x\n").unwrap(), vec![]);
    }

    #[test]
    fn value_parsers() {
        assert!(parse_radius("0.9").is_err());
        assert!(parse_radius("1").is_err());
        assert_eq!(parse_radius("1.5"), Ok(1.5));
        assert!(parse_temperature("-1").is_err());
        assert_eq!(parse_shape("48x24x48"), Ok((48, 24, 48)));
        assert!(parse_shape("48x24").is_err());
        assert_eq!(parse_range("1:2:3").unwrap().values(), vec![1.0, 1.5, 2.0]);
        assert!(parse_range("2:1:3").is_err());
        assert!(parse_range("1:2").is_err());
        assert!(parse_range("1:2:0").is_err());
    }
}
