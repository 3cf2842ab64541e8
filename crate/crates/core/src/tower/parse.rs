use num_bigint::BigInt;

use super::direct::DirectTower;
use crate::error::{Error, Result};
use crate::expr::{parse_expr, GroupExpr};
use crate::fg::{FgGroup, FgHom, IntMatrix};

fn parse_err<T>(offset: usize, message: impl Into<String>) -> Result<T> {
    Err(Error::Parse {
        offset,
        message: message.into(),
    })
}

fn shift(e: Error, by: usize) -> Error {
    match e {
        Error::Parse { offset, message } => Error::Parse {
            offset: offset + by,
            message,
        },
        other => other,
    }
}

/// `p`, `p=3`-style arguments, in order.
fn numbers(args: &str, base: usize, names: &[&str]) -> Result<Vec<u64>> {
    let parts: Vec<&str> = args.split(',').collect();
    if parts.len() != names.len() {
        return parse_err(base, format!("expected {} argument(s): {}", names.len(), names.join(", ")));
    }
    let mut out = Vec::new();
    let mut at = base;
    for (part, name) in parts.iter().zip(names) {
        let value = match part.split_once('=') {
            Some((k, v)) if k.trim() == *name => v,
            Some((k, _)) => return parse_err(at, format!("expected `{name}`, found `{}`", k.trim())),
            None => part,
        };
        match value.trim().parse() {
            Ok(v) => out.push(v),
            Err(_) => return parse_err(at, format!("`{}` is not a number", value.trim())),
        }
        at += part.len() + 1;
    }
    Ok(out)
}

fn fg(s: &str, at: usize) -> Result<FgGroup> {
    let e = parse_expr(s).map_err(|e| shift(e, at))?;
    match e.as_fg() {
        Some(g) => Ok(g),
        None => parse_err(at, format!("{e} is not finitely generated")),
    }
}

/// Index of the bracket closing the one at `open`.
fn matching(s: &str, open: usize) -> Option<usize> {
    let mut depth = 0i32;
    for (i, c) in s[open..].char_indices() {
        match c {
            '[' | '(' => depth += 1,
            ']' | ')' => {
                depth -= 1;
                if depth == 0 {
                    return Some(open + i);
                }
            }
            _ => {}
        }
    }
    None
}

/// Splits on commas outside brackets, returning trimmed pieces and offsets.
fn split_top(s: &str, base: usize) -> Vec<(&str, usize)> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '[' | '(' => depth += 1,
            ']' | ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push((&s[start..i], base + start));
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push((&s[start..], base + start));
    out.into_iter()
        .map(|(p, at)| (p.trim(), at + p.len() - p.trim_start().len()))
        .filter(|(p, _)| !p.is_empty())
        .collect()
}

fn explicit(args: &str, base: usize) -> Result<DirectTower> {
    let args_trim = args.trim_start();
    let lead = args.len() - args_trim.len();
    if !args_trim.starts_with('[') {
        return parse_err(base + lead, "expected `[` opening the stage list");
    }
    let close = matching(args_trim, 0).ok_or(Error::Parse {
        offset: base + lead,
        message: "unclosed stage list".into(),
    })?;
    let stages = split_top(&args_trim[1..close], base + lead + 1)
        .into_iter()
        .map(|(s, at)| fg(s, at))
        .collect::<Result<Vec<_>>>()?;
    let rest = &args_trim[close + 1..];
    let rest_at = base + lead + close + 1;
    let Some(json) = rest.trim_start().strip_prefix(',') else {
        return parse_err(rest_at, "expected `,` before the map list");
    };
    let json_at = rest_at + rest.len() - json.len();
    let raw: Vec<Vec<Vec<i64>>> = serde_json::from_str(json.trim()).map_err(|e| Error::Parse {
        offset: json_at,
        message: format!("maps must be a JSON list of integer matrices: {e}"),
    })?;
    if raw.len() + 1 != stages.len() {
        return parse_err(
            json_at,
            format!("{} stages need {} maps, got {}", stages.len(), stages.len().saturating_sub(1), raw.len()),
        );
    }
    let mut maps = Vec::new();
    for (i, rows) in raw.iter().enumerate() {
        let (src, dst) = (&stages[i], &stages[i + 1]);
        let m = if rows.is_empty() || rows.iter().all(Vec::is_empty) {
            IntMatrix::zeros(dst.ngens(), src.ngens())
        } else {
            let ncols = rows[0].len();
            if rows.iter().any(|r| r.len() != ncols) {
                return parse_err(json_at, format!("map {} has ragged rows", i + 1));
            }
            let data: Vec<BigInt> = rows.iter().flatten().map(|&x| BigInt::from(x)).collect();
            IntMatrix::from_vec(rows.len(), ncols, data)?
        };
        maps.push(FgHom::new(src.clone(), dst.clone(), m)?);
    }
    DirectTower::explicit(stages, maps)
}

/// Parses the tower catalog: `stable(<expr>)`, `prufer(p)`, `elementary(p,k)`,
/// `free(step)`, `affine(p; a*n+b)`, `explicit([stages], [maps])`. Arguments
/// may be named (`prufer(p=3)`). A bare finitely generated expression is a
/// stable tower.
pub fn parse_tower(s: &str) -> Result<DirectTower> {
    let lead = s.len() - s.trim_start().len();
    let t = s.trim();
    let name_len = t.find(|c: char| !c.is_ascii_alphabetic()).unwrap_or(t.len());
    let name = &t[..name_len];
    let catalog = ["stable", "prufer", "elementary", "free", "affine", "explicit"];
    if !catalog.contains(&name) {
        return Ok(DirectTower::stable(fg(t, lead)?));
    }
    let open = lead + name_len;
    if !t[name_len..].starts_with('(') {
        return parse_err(open, format!("expected `(` after {name}"));
    }
    if !t.ends_with(')') || matching(t, name_len) != Some(t.len() - 1) {
        return parse_err(lead + t.len(), "expected `)` closing the tower");
    }
    let args = &t[name_len + 1..t.len() - 1];
    let at = open + 1;
    let checked = |r: Result<DirectTower>| {
        r.map_err(|e| match e {
            Error::InvalidTower(m) => Error::Parse { offset: lead, message: m },
            other => other,
        })
    };
    match name {
        "stable" => Ok(DirectTower::stable(fg(args, at)?)),
        "prufer" => {
            let v = numbers(args, at, &["p"])?;
            checked(DirectTower::prufer(v[0]))
        }
        "elementary" => {
            let v = numbers(args, at, &["p", "k"])?;
            let k = u32::try_from(v[1]).or_else(|_| parse_err(at, "k out of range"))?;
            checked(DirectTower::elementary(v[0], k))
        }
        "free" => {
            let v = numbers(args, at, &["step"])?;
            checked(DirectTower::free(v[0] as usize))
        }
        "affine" => {
            // Same argument grammar as InfSum, and the names have equal length.
            let e = parse_expr(&format!("InfSum({args})")).map_err(|e| shift(e, lead))?;
            match e {
                GroupExpr::InfSum(r) => checked(DirectTower::affine(r.p, r.slope, r.offset)),
                _ => parse_err(at, "expected `p; a*n+b`"),
            }
        }
        "explicit" => checked(explicit(args, at)),
        _ => unreachable!(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tower::DirectKind;

    #[test]
    fn catalog_round_trips() {
        for s in [
            "stable(Z/4)",
            "prufer(3)",
            "elementary(2,1)",
            "free(1)",
            "affine(2; n)",
            "affine(3; 2*n-1)",
            "explicit([Z/2, Z/4], [[[2]]])",
            "explicit([Z, Sum(Z, Z/2)], [[[1],[0]]])",
        ] {
            let t = parse_tower(s).unwrap();
            assert_eq!(parse_tower(&t.to_string()).unwrap(), t, "{s}");
        }
        assert_eq!(parse_tower("prufer(p=3)").unwrap(), DirectTower::prufer(3).unwrap());
        assert_eq!(parse_tower(" elementary(p=2, k=1) ").unwrap(), DirectTower::elementary(2, 1).unwrap());
        assert!(matches!(parse_tower("Z^2").unwrap().kind(), DirectKind::Stable(_)));
    }

    #[test]
    fn errors() {
        let off = |s: &str| match parse_tower(s) {
            Err(Error::Parse { offset, .. }) => offset,
            other => panic!("{s}: {other:?}"),
        };
        assert_eq!(off("prufer(4)"), 0);
        assert_eq!(off("prufer(q=3)"), 7);
        assert_eq!(off("stable(Prufer(2))"), 7);
        assert_eq!(off("affine(2; -n)"), 10);
        assert!(matches!(
            parse_tower("explicit([Z/2, Z/4], [[[0]]])"),
            Err(Error::Parse { .. })
        ));
        assert_eq!(off("explicit([Z/2, Q], [[[2]]])"), 15);
    }
}
