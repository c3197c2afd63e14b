//! Molpro-style FCIDUMP reader.
//!
//! ```text
//! &FCI NORB=4,NELEC=4,MS2=0,
//!  ORBSYM=1,1,1,1,
//!  ISYM=1,
//! &END
//!  0.5  1 1 1 1      (11|11)
//! -1.25 1 2 0 0      h1[0][1]
//! -0.6  1 0 0 0      orbital energy of orbital 0
//!  0.71 0 0 0 0      core energy
//! ```
//!
//! `ORBSYM`/`ISYM` are read and ignored.

use std::collections::HashMap;

use super::integrals::MolecularIntegrals;
use crate::{Error, Result};

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Fcidump { line, msg: msg.into() }
}

fn parse_real(tok: &str) -> Option<f64> {
    tok.replace(['D', 'd'], "E").parse().ok()
}

struct Header {
    norb: usize,
    nelec: usize,
    ms2: i64,
}

fn parse_header(text: &str) -> Result<Header> {
    let mut fields: HashMap<String, Vec<String>> = HashMap::new();
    let mut current: Option<String> = None;
    for tok in text.replace(',', " ").split_whitespace() {
        let upper = tok.to_ascii_uppercase();
        if upper == "&FCI" || upper == "&END" || upper == "/" {
            continue;
        }
        let upper = upper.trim_start_matches("&FCI").to_string();
        if let Some((k, v)) = upper.split_once('=') {
            let key = k.trim().to_string();
            let entry = fields.entry(key.clone()).or_default();
            if !v.is_empty() {
                entry.push(v.to_string());
            }
            current = Some(key);
        } else if let Some(key) = &current {
            fields.entry(key.clone()).or_default().push(upper);
        } else {
            return Err(err(1, format!("unexpected token '{tok}' in namelist")));
        }
    }
    let int = |key: &str| -> Result<Option<i64>> {
        match fields.get(key).and_then(|v| v.first()) {
            None => Ok(None),
            Some(v) => v
                .parse::<i64>()
                .map(Some)
                .map_err(|_| err(1, format!("{key}={v} is not an integer"))),
        }
    };
    let norb = int("NORB")?.ok_or_else(|| err(1, "namelist lacks NORB"))?;
    let nelec = int("NELEC")?.ok_or_else(|| err(1, "namelist lacks NELEC"))?;
    let ms2 = int("MS2")?.unwrap_or(0);
    if norb <= 0 || nelec < 0 || (nelec + ms2) % 2 != 0 || ms2.abs() > nelec {
        return Err(err(1, format!("inconsistent NORB={norb} NELEC={nelec} MS2={ms2}")));
    }
    Ok(Header {
        norb: norb as usize,
        nelec: nelec as usize,
        ms2,
    })
}

/// Parses FCIDUMP text into integrals with all symmetries filled in and
/// 0-based indices.
pub fn parse_fcidump(text: &str) -> Result<MolecularIntegrals> {
    let mut header_text = String::new();
    let mut body_start = None;
    let mut seen_fci = false;
    for (n, line) in text.lines().enumerate() {
        let upper = line.trim().to_ascii_uppercase();
        if !seen_fci {
            if upper.is_empty() {
                continue;
            }
            if !upper.starts_with("&FCI") {
                return Err(err(n + 1, "expected '&FCI' namelist"));
            }
            seen_fci = true;
        }
        header_text.push_str(line);
        header_text.push('\n');
        if upper.contains("&END") || upper == "/" || upper.ends_with('/') {
            body_start = Some(n + 1);
            break;
        }
    }
    let body_start = body_start.ok_or_else(|| err(1, "unterminated namelist"))?;
    let header = parse_header(&header_text)?;
    let n = header.norb;
    let n_alpha = (header.nelec as i64 + header.ms2) / 2;
    let n_beta = (header.nelec as i64 - header.ms2) / 2;
    let mut ints = MolecularIntegrals::zeros(n, n_alpha as usize, n_beta as usize)
        .map_err(|e| err(1, e.to_string()))?;
    let mut orb_e = vec![None; n];

    for (k, line) in text.lines().enumerate().skip(body_start) {
        let lineno = k + 1;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        if toks.len() != 5 {
            return Err(err(lineno, format!("expected 'value i j k l', got {} fields", toks.len())));
        }
        let v = parse_real(toks[0]).ok_or_else(|| err(lineno, format!("non-numeric value '{}'", toks[0])))?;
        let mut idx = [0usize; 4];
        for (slot, tok) in idx.iter_mut().zip(&toks[1..]) {
            let i: i64 = tok
                .parse()
                .map_err(|_| err(lineno, format!("non-numeric index '{tok}'")))?;
            if i < 0 || i as usize > n {
                return Err(err(lineno, format!("index {i} outside [0, {n}]")));
            }
            *slot = i as usize;
        }
        match idx {
            [0, 0, 0, 0] => ints.e_core = v,
            [i, 0, 0, 0] => orb_e[i - 1] = Some(v),
            [i, j, 0, 0] if j > 0 => ints.set_h1(i - 1, j - 1, v),
            [i, j, k, l] if i > 0 && j > 0 && k > 0 && l > 0 => ints.set_h2(i - 1, j - 1, k - 1, l - 1, v),
            _ => return Err(err(lineno, format!("invalid index pattern {idx:?}"))),
        }
    }
    if orb_e.iter().all(Option::is_some) {
        ints.orb_energies = Some(orb_e.into_iter().map(Option::unwrap).collect());
    }
    Ok(ints)
}

/// Writes integrals in the same format, unique entries only.
pub fn write_fcidump(ints: &MolecularIntegrals) -> String {
    use std::fmt::Write;
    let n = ints.n_orb;
    let mut s = String::new();
    let ms2 = ints.n_alpha as i64 - ints.n_beta as i64;
    writeln!(s, " &FCI NORB={n},NELEC={},MS2={ms2},", ints.n_alpha + ints.n_beta).unwrap();
    writeln!(s, "  ORBSYM={}", "1,".repeat(n)).unwrap();
    writeln!(s, "  ISYM=1,\n &END").unwrap();
    let pair = |a: usize, b: usize| a * (a + 1) / 2 + b;
    for i in 0..n {
        for j in 0..=i {
            for k in 0..n {
                for l in 0..=k {
                    if pair(i, j) < pair(k, l) {
                        continue;
                    }
                    let v = ints.h2(i, j, k, l);
                    if v != 0.0 {
                        writeln!(s, "{v:.17e} {} {} {} {}", i + 1, j + 1, k + 1, l + 1).unwrap();
                    }
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..=i {
            let v = ints.h1(i, j);
            if v != 0.0 {
                writeln!(s, "{v:.17e} {} {} 0 0", i + 1, j + 1).unwrap();
            }
        }
    }
    if let Some(e) = &ints.orb_energies {
        for (i, v) in e.iter().enumerate() {
            writeln!(s, "{v:.17e} {} 0 0 0", i + 1).unwrap();
        }
    }
    writeln!(s, "{:.17e} 0 0 0 0", ints.e_core).unwrap();
    s
}
