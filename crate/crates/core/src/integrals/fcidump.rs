use std::fmt::Write as _;

use super::IntegralSet;
use crate::{Error, Result};

fn parse_float(tok: &str) -> Option<f64> {
    tok.replace(['D', 'd'], "E").parse().ok()
}

/// Parses the FCIDUMP text format (chemists' notation, 1-based indices).
pub fn parse_fcidump(text: &str) -> Result<IntegralSet> {
    let mut header = String::new();
    let mut header_done = false;
    let mut body_start = 0;
    let mut lines = text.lines().enumerate();
    for (lineno, raw) in lines.by_ref() {
        header.push_str(raw);
        header.push(' ');
        let t = raw.trim().to_ascii_uppercase();
        if t.ends_with("&END") || t == "/" || t.ends_with("/") {
            header_done = true;
            body_start = lineno + 1;
            break;
        }
    }
    if !header_done {
        return Err(Error::Parse {
            line: 1,
            msg: "missing &END terminating the header".into(),
        });
    }
    let upper = header.to_ascii_uppercase();
    if !upper.trim_start().starts_with("&FCI") {
        return Err(Error::Parse {
            line: 1,
            msg: "header must start with &FCI".into(),
        });
    }

    let lookup = |key: &str| -> Result<Option<i64>> {
        let Some(pos) = find_key(&upper, key) else {
            return Ok(None);
        };
        let rest = upper[pos + key.len()..].trim_start();
        let rest = rest.strip_prefix('=').ok_or_else(|| Error::Parse {
            line: 1,
            msg: format!("expected '=' after {key}"),
        })?;
        let digits: String = rest
            .trim_start()
            .chars()
            .take_while(|c| c.is_ascii_digit() || *c == '-' || *c == '+')
            .collect();
        digits.parse().map(Some).map_err(|_| Error::Parse {
            line: 1,
            msg: format!("bad value for {key}"),
        })
    };

    let norb = lookup("NORB")?.ok_or_else(|| Error::Parse {
        line: 1,
        msg: "NORB missing".into(),
    })?;
    let nelec = lookup("NELEC")?.ok_or_else(|| Error::Parse {
        line: 1,
        msg: "NELEC missing".into(),
    })?;
    let ms2 = lookup("MS2")?.unwrap_or(0);
    if norb < 0 || nelec < 0 {
        return Err(Error::Parse {
            line: 1,
            msg: "negative NORB or NELEC".into(),
        });
    }
    if ms2 != 0 || nelec % 2 != 0 {
        return Err(Error::UnsupportedOpenShell(format!("MS2={ms2}, NELEC={nelec}")));
    }
    let n = norb as usize;
    let mut s = IntegralSet::zeros(n, nelec as usize);

    for (lineno, raw) in text.lines().enumerate().skip(body_start) {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| Error::Parse { line: lineno + 1, msg };
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 5 {
            return Err(err(format!("expected 5 fields, found {}", toks.len())));
        }
        let v = parse_float(toks[0]).ok_or_else(|| err(format!("bad value {:?}", toks[0])))?;
        let mut idx = [0usize; 4];
        for (k, tok) in toks[1..].iter().enumerate() {
            let i: usize = tok.parse().map_err(|_| err(format!("bad index {tok:?}")))?;
            if i > n {
                return Err(err(format!("index {i} exceeds NORB={n}")));
            }
            idx[k] = i;
        }
        match idx {
            [0, 0, 0, 0] => s.e_core = v,
            [i, j, 0, 0] if i > 0 && j > 0 => {
                s.int1e[(i - 1, j - 1)] = v;
                s.int1e[(j - 1, i - 1)] = v;
            }
            [i, j, k, l] if i > 0 && j > 0 && k > 0 && l > 0 => s.set_eri(i - 1, j - 1, k - 1, l - 1, v),
            // orbital energies and other entries with partial zero indices
            _ => {}
        }
    }
    Ok(s)
}

fn find_key(upper: &str, key: &str) -> Option<usize> {
    let bytes = upper.as_bytes();
    let mut from = 0;
    while let Some(off) = upper[from..].find(key) {
        let pos = from + off;
        let before_ok = pos == 0 || !bytes[pos - 1].is_ascii_alphanumeric();
        let after = upper[pos + key.len()..].trim_start();
        if before_ok && after.starts_with('=') {
            return Some(pos);
        }
        from = pos + key.len();
    }
    None
}

/// Writes the unique integrals, skipping exact zeros.
pub fn write_fcidump(s: &IntegralSet) -> String {
    let n = s.n_orb;
    let mut out = String::new();
    let orbsym = vec!["1"; n].join(",");
    let _ = writeln!(out, " &FCI NORB={n},NELEC={},MS2=0,", s.n_elec);
    let _ = writeln!(out, "  ORBSYM={orbsym}{}", if n > 0 { "," } else { "" });
    let _ = writeln!(out, "  ISYM=1,");
    let _ = writeln!(out, " &END");
    for p in 0..n {
        for q in 0..=p {
            for r in 0..n {
                for t in 0..=r {
                    if p * (p + 1) / 2 + q < r * (r + 1) / 2 + t {
                        continue;
                    }
                    let v = s.eri(p, q, r, t);
                    if v != 0.0 {
                        let _ = writeln!(out, "{v:.17e} {} {} {} {}", p + 1, q + 1, r + 1, t + 1);
                    }
                }
            }
        }
    }
    for p in 0..n {
        for q in 0..=p {
            let v = s.int1e[(p, q)];
            if v != 0.0 {
                let _ = writeln!(out, "{v:.17e} {} {} 0 0", p + 1, q + 1);
            }
        }
    }
    let _ = writeln!(out, "{:.17e} 0 0 0 0", s.e_core);
    out
}
