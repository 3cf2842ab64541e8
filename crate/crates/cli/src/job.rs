use std::fmt;
use std::path::PathBuf;

use uctkit::expr::{canonicalize, parse_expr};
use uctkit::tower::{parse_tower, DEFAULT_WINDOW};
use uctkit::{DirectTower, Error, GroupExpr, KTheoryData};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Functor {
    Hom,
    Ext,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Catalog {
    Remark24,
    Remark46,
    Example53,
    VanishingSuite,
    FiniteModels,
}

impl Catalog {
    pub const ALL: [Catalog; 5] = [
        Catalog::Remark24,
        Catalog::Remark46,
        Catalog::Example53,
        Catalog::VanishingSuite,
        Catalog::FiniteModels,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Catalog::Remark24 => "remark24",
            Catalog::Remark46 => "remark46",
            Catalog::Example53 => "example53",
            Catalog::VanishingSuite => "thm52-suite",
            Catalog::FiniteModels => "finite-models",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Command {
    FgHom { source: GroupExpr, target: GroupExpr },
    FgExt { source: GroupExpr, target: GroupExpr },
    TowerAnalyze { tower: DirectTower, functor: Functor, target: GroupExpr, stage: usize },
    Pext { tower: DirectTower, target: GroupExpr },
    UctReport { data: KTheoryData, degree: Option<usize> },
    DiagramCheck { data: KTheoryData, degree: Option<usize> },
    CatalogRun { catalog: Catalog },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Options {
    pub window: usize,
    pub truncation: Option<u32>,
    pub strict: bool,
    pub summary: bool,
    pub out: Option<PathBuf>,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            window: DEFAULT_WINDOW,
            truncation: None,
            strict: false,
            summary: false,
            out: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JobSpec {
    pub command: Command,
    pub options: Options,
}

/// A whitespace-separated token; brackets protect inner whitespace.
struct Token<'a> {
    text: &'a str,
    at: usize,
}

fn tokens(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = None;
    for (i, c) in line.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            _ => {}
        }
        if c.is_whitespace() && depth <= 0 {
            if let Some(s) = start.take() {
                out.push(Token { text: &line[s..i], at: s });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Token { text: &line[s..], at: s });
    }
    out
}

struct Ctx {
    line: usize,
}

impl Ctx {
    fn err(&self, at: usize, message: impl Into<String>) -> CliError {
        CliError::Parse {
            line: self.line,
            column: at + 1,
            message: message.into(),
        }
    }

    /// Lifts a core error at byte `at` of the line.
    fn lift(&self, at: usize, e: Error) -> CliError {
        match e {
            Error::Parse { offset, message } => self.err(at + offset, message),
            other => CliError::Semantic(other.to_string()),
        }
    }

    fn expr(&self, s: &str, at: usize) -> Result<GroupExpr, CliError> {
        let e = parse_expr(s).map_err(|e| self.lift(at, e))?;
        e.validate().map_err(|e| self.lift(at, e))?;
        Ok(canonicalize(&e))
    }

    fn tower(&self, s: &str, at: usize) -> Result<DirectTower, CliError> {
        parse_tower(s).map_err(|e| self.lift(at, e))
    }

    fn number<T: std::str::FromStr>(&self, s: &str, at: usize, what: &str) -> Result<T, CliError> {
        s.parse().map_err(|_| self.err(at, format!("{what} must be a nonnegative integer, got `{s}`")))
    }
}

/// A field value with its line offset.
struct Field<'a> {
    name: &'a str,
    value: &'a str,
    at: usize,
    value_at: usize,
}

const COMMANDS: [&str; 7] = [
    "fg-hom",
    "fg-ext",
    "tower-analyze",
    "pext",
    "uct-report",
    "diagram-check",
    "catalog-run",
];

/// Parses one job line. `line_no` is 1-based and only used in diagnostics.
pub fn parse_job(text: &str, line_no: usize) -> Result<JobSpec, CliError> {
    let ctx = Ctx { line: line_no };
    let toks = tokens(text);
    let Some(head) = toks.first() else {
        return Err(ctx.err(0, "empty job"));
    };
    if !COMMANDS.contains(&head.text) {
        return Err(ctx.err(
            head.at,
            format!("unknown command `{}`; expected one of {}", head.text, COMMANDS.join(", ")),
        ));
    }
    let mut options = Options::default();
    let mut positional = Vec::new();
    let mut fields: Vec<Field> = Vec::new();
    let mut k = 1;
    while k < toks.len() {
        let t = &toks[k];
        if let Some(flag) = t.text.strip_prefix("--") {
            let (name, inline) = match flag.split_once('=') {
                Some((n, v)) => (n, Some((v, t.at + 3 + n.len()))),
                None => (flag, None),
            };
            let mut value = || -> Result<(&str, usize), CliError> {
                if let Some(v) = inline {
                    return Ok(v);
                }
                k += 1;
                toks.get(k)
                    .map(|v| (v.text, v.at))
                    .ok_or_else(|| ctx.err(t.at, format!("--{name} needs a value")))
            };
            match name {
                "strict" => options.strict = true,
                "summary" => options.summary = true,
                "window" => {
                    let (v, at) = value()?;
                    options.window = ctx.number(v, at, "window")?;
                    if options.window == 0 {
                        return Err(ctx.err(at, "window must be positive"));
                    }
                }
                "truncation" => {
                    let (v, at) = value()?;
                    options.truncation = Some(ctx.number(v, at, "truncation")?);
                }
                "out" => options.out = Some(PathBuf::from(value()?.0)),
                _ => {
                    let (v, at) = value()?;
                    fields.push(Field {
                        name,
                        value: v,
                        at: t.at,
                        value_at: at,
                    });
                }
            }
        } else if let Some((name, v)) = t.text.split_once('=').filter(|(n, _)| !n.contains('(')) {
            fields.push(Field {
                name,
                value: v,
                at: t.at,
                value_at: t.at + name.len() + 1,
            });
        } else {
            positional.push(t);
        }
        k += 1;
    }

    let mut take = |name: &str| -> Option<(String, usize)> {
        let i = fields.iter().position(|f| f.name == name)?;
        let f = fields.remove(i);
        Some((f.value.to_string(), f.value_at))
    };
    let end = text.len();
    let command = match head.text {
        "fg-hom" | "fg-ext" => {
            let (g, h) = match (positional.as_slice(), take("source"), take("target")) {
                ([g, h], None, None) => (ctx.expr(g.text, g.at)?, ctx.expr(h.text, h.at)?),
                ([], Some((g, ga)), Some((h, ha))) => (ctx.expr(&g, ga)?, ctx.expr(&h, ha)?),
                _ => return Err(ctx.err(head.at, format!("{} takes two groups", head.text))),
            };
            if g.as_fg().is_none() {
                return Err(CliError::Semantic(format!("{} needs a finitely generated source, got {g}", head.text)));
            }
            positional.clear();
            if head.text == "fg-hom" {
                Command::FgHom { source: g, target: h }
            } else {
                Command::FgExt { source: g, target: h }
            }
        }
        "tower-analyze" | "pext" => {
            let (t, ta) = take("tower").ok_or_else(|| ctx.err(end, "missing --tower"))?;
            let (h, ha) = take("target").ok_or_else(|| ctx.err(end, "missing --target"))?;
            let tower = ctx.tower(&t, ta)?;
            let target = ctx.expr(&h, ha)?;
            if head.text == "pext" {
                Command::Pext { tower, target }
            } else {
                let functor = match take("functor") {
                    None => Functor::Hom,
                    Some((f, _)) if f == "hom" => Functor::Hom,
                    Some((f, _)) if f == "ext" => Functor::Ext,
                    Some((f, at)) => return Err(ctx.err(at, format!("functor must be hom or ext, got `{f}`"))),
                };
                let stage = match take("stage") {
                    None => 1,
                    Some((s, at)) => match ctx.number::<usize>(&s, at, "stage")? {
                        0 => return Err(ctx.err(at, "stages start at 1")),
                        s => s,
                    },
                };
                Command::TowerAnalyze {
                    tower,
                    functor,
                    target,
                    stage,
                }
            }
        }
        "uct-report" | "diagram-check" => {
            let mut tower = |name: &str| match take(name) {
                Some((v, at)) => ctx.tower(&v, at),
                None => Ok(DirectTower::stable(uctkit::FgGroup::trivial())),
            };
            let (ka0, ka1) = (tower("K0A")?, tower("K1A")?);
            let mut group = |name: &str| match take(name) {
                Some((v, at)) => ctx.expr(&v, at),
                None => Ok(GroupExpr::zero()),
            };
            let (kb0, kb1) = (group("K0B")?, group("K1B")?);
            let degree = match take("degree") {
                None => None,
                Some((d, at)) => match ctx.number::<usize>(&d, at, "degree")? {
                    d @ (0 | 1) => Some(d),
                    _ => return Err(ctx.err(at, "degree is 0 or 1")),
                },
            };
            let data = KTheoryData::new(ka0, ka1, kb0, kb1);
            if head.text == "uct-report" {
                Command::UctReport { data, degree }
            } else {
                Command::DiagramCheck { data, degree }
            }
        }
        "catalog-run" => {
            let name = match (positional.as_slice(), take("name")) {
                ([n], None) => (n.text.to_string(), n.at),
                ([], Some(n)) => n,
                _ => return Err(ctx.err(head.at, "catalog-run takes one catalog name")),
            };
            positional.clear();
            let catalog = Catalog::ALL.into_iter().find(|c| c.name() == name.0).ok_or_else(|| {
                let names: Vec<&str> = Catalog::ALL.iter().map(|c| c.name()).collect();
                ctx.err(name.1, format!("unknown catalog `{}`; expected one of {}", name.0, names.join(", ")))
            })?;
            Command::CatalogRun { catalog }
        }
        _ => unreachable!(),
    };
    if let Some(f) = fields.first() {
        return Err(ctx.err(f.at, format!("unexpected field `{}` for {}", f.name, head.text)));
    }
    if let Some(p) = positional.first() {
        return Err(ctx.err(p.at, format!("unexpected argument `{}`", p.text)));
    }
    Ok(JobSpec { command, options })
}

/// Parses a job file: one job per line, `#` starts a comment.
pub fn parse_jobs(text: &str) -> Result<Vec<JobSpec>, CliError> {
    let mut jobs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("");
        if body.trim().is_empty() {
            continue;
        }
        jobs.push(parse_job(body, i + 1)?);
    }
    Ok(jobs)
}

fn data_fields(f: &mut fmt::Formatter<'_>, d: &KTheoryData) -> fmt::Result {
    write!(f, " K0A={} K1A={} K0B={} K1B={}", d.ka[0], d.ka[1], d.kb[0], d.kb[1])
}

/// Prints the job in the input grammar; `parse_job` reads it back to an
/// equal spec.
impl fmt::Display for JobSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.command {
            Command::FgHom { source, target } => write!(f, "fg-hom {source} {target}")?,
            Command::FgExt { source, target } => write!(f, "fg-ext {source} {target}")?,
            Command::TowerAnalyze {
                tower,
                functor,
                target,
                stage,
            } => {
                let name = match functor {
                    Functor::Hom => "hom",
                    Functor::Ext => "ext",
                };
                write!(f, "tower-analyze --tower {tower} --functor {name} --target {target} --stage {stage}")?
            }
            Command::Pext { tower, target } => write!(f, "pext --tower {tower} --target {target}")?,
            Command::UctReport { data, degree } | Command::DiagramCheck { data, degree } => {
                let name = if matches!(self.command, Command::UctReport { .. }) {
                    "uct-report"
                } else {
                    "diagram-check"
                };
                write!(f, "{name}")?;
                data_fields(f, data)?;
                if let Some(d) = degree {
                    write!(f, " --degree {d}")?;
                }
            }
            Command::CatalogRun { catalog } => write!(f, "catalog-run {}", catalog.name())?,
        }
        let o = &self.options;
        if o.window != DEFAULT_WINDOW {
            write!(f, " --window {}", o.window)?;
        }
        if let Some(t) = o.truncation {
            write!(f, " --truncation {t}")?;
        }
        if o.strict {
            write!(f, " --strict")?;
        }
        if o.summary {
            write!(f, " --summary")?;
        }
        if let Some(p) = &o.out {
            write!(f, " --out {}", p.display())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brief_examples_parse() {
        let j = parse_job("fg-ext Z/4 Z/6", 1).unwrap();
        assert!(matches!(j.command, Command::FgExt { .. }));
        let j = parse_job("pext --tower elementary(2,1) --target Z", 1).unwrap();
        assert!(matches!(j.command, Command::Pext { .. }));
        let j = parse_job("uct-report K0A=prufer(p=3) K1A=0 K0B=0 K1B=InfSum(3; n)", 1).unwrap();
        match j.command {
            Command::UctReport { data, .. } => {
                assert_eq!(data.ka[0], DirectTower::prufer(3).unwrap());
                assert_eq!(data.kb[1], GroupExpr::inf_sum(3, 1, 0).unwrap());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn round_trip() {
        for line in [
            "fg-hom Z^2 Sum(Z/2, Prufer(3))",
            "fg-ext Z/4 Z/6 --window 20 --strict",
            "tower-analyze --tower prufer(2) --functor ext --target InfSum(2; n) --stage 3 --truncation 9",
            "pext --tower affine(3; 2*n+1) --target Z --summary",
            "uct-report K0A=explicit([Z/2, Z/4], [[[2]]]) K1A=free(1) K0B=Z K1B=Padic(2; Z) --degree 1",
            "diagram-check K0A=stable(Z/4) K0B=Z/4",
            "catalog-run finite-models --out report.json",
        ] {
            let spec = parse_job(line, 1).unwrap();
            let printed = spec.to_string();
            assert_eq!(parse_job(&printed, 1).unwrap(), spec, "{line} -> {printed}");
        }
    }

    #[test]
    fn diagnostics() {
        let at = |s: &str| match parse_job(s, 3) {
            Err(CliError::Parse { line, column, .. }) => (line, column),
            other => panic!("{s}: {other:?}"),
        };
        assert_eq!(at("fg-hom Z/4 Z/"), (3, 14));
        assert_eq!(at("pext --tower prufer(4) --target Z"), (3, 14));
        assert_eq!(at("uct-report K0A=prufer(p=3) K9A=0"), (3, 28));
        assert_eq!(at("frobnicate"), (3, 1));
        assert!(matches!(
            parse_job("diagram-check K0A=explicit([Z/2, Z/4], [[[0]]])", 1),
            Err(CliError::Parse { .. })
        ));
        assert!(matches!(parse_job("fg-ext Prufer(2) Z", 1), Err(CliError::Semantic(_))));
    }
}
