//! Reading and writing games and solutions in the PGSolver text format.
//!
//! Games: an optional `parity <max-id>;` header, then one vertex per line,
//! `<id> <priority> <owner> <succ>,<succ>,... ["name"];`, owner 0 for Even
//! and 1 for Odd. A `start <id>;` line is accepted and ignored. Ids must be
//! exactly `0..n` in any order.
//!
//! Solutions: `paritysol <max-id>;`, then `<id> <winner> [<succ>];`.

use std::collections::BTreeMap;
use std::fmt::Write;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::game::{GameError, GameParts, ParityGame, Player};
use crate::report::SolveReport;
use crate::strategy::Strategy;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error(transparent)]
    Game(#[from] GameError),
}

fn syntax(line: usize, reason: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        reason: reason.into(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolutionFormat {
    Text,
    Structured,
}

impl std::str::FromStr for SolutionFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<SolutionFormat, String> {
        match s {
            "text" => Ok(SolutionFormat::Text),
            "structured" => Ok(SolutionFormat::Structured),
            _ => Err(format!("unknown format {s:?} (expected text or structured)")),
        }
    }
}

/// Non-empty lines with their 1-based numbers and the trailing `;` removed.
fn statements(text: &str) -> impl Iterator<Item = (usize, Result<&str, ParseError>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.trim();
        if line.is_empty() {
            return None;
        }
        let body = line
            .strip_suffix(';')
            .map(str::trim)
            .ok_or_else(|| syntax(i + 1, "missing ';'"));
        Some((i + 1, body))
    })
}

fn number<T: std::str::FromStr>(line: usize, what: &str, token: Option<&str>) -> Result<T, ParseError> {
    let token = token.ok_or_else(|| syntax(line, format!("missing {what}")))?;
    token
        .parse()
        .map_err(|_| syntax(line, format!("bad {what} {token:?}")))
}

struct VertexLine {
    line: usize,
    priority: u32,
    owner: Player,
    successors: Vec<usize>,
    name: Option<String>,
}

pub fn parse_pgsolver(text: &str) -> Result<ParityGame, ParseError> {
    let mut header: Option<usize> = None;
    let mut vertices: BTreeMap<usize, VertexLine> = BTreeMap::new();
    for (line, body) in statements(text) {
        let body = body?;
        if let Some(rest) = body.strip_prefix("parity ") {
            if header.is_some() || !vertices.is_empty() {
                return Err(syntax(line, "header must come first"));
            }
            header = Some(number(line, "maximal id", Some(rest.trim()))?);
            continue;
        }
        if let Some(rest) = body.strip_prefix("start ") {
            number::<usize>(line, "start vertex", Some(rest.trim()))?;
            continue;
        }
        let (fields, name) = match body.find('"') {
            Some(at) => {
                let quoted = &body[at + 1..];
                let name = quoted
                    .strip_suffix('"')
                    .filter(|n| !n.contains('"'))
                    .ok_or_else(|| syntax(line, "malformed name"))?;
                (&body[..at], Some(name.to_string()))
            }
            None => (body, None),
        };
        let mut tokens = fields.split_whitespace();
        let id: usize = number(line, "vertex id", tokens.next())?;
        let priority: u32 = number(line, "priority", tokens.next())?;
        let owner = match number::<usize>(line, "owner", tokens.next())? {
            0 => Player::Even,
            1 => Player::Odd,
            o => return Err(syntax(line, format!("owner must be 0 or 1, not {o}"))),
        };
        let rest: String = tokens.collect();
        if rest.is_empty() {
            return Err(syntax(line, "empty successor list"));
        }
        let successors = rest
            .split(',')
            .map(|s| number(line, "successor", Some(s).filter(|s| !s.is_empty())))
            .collect::<Result<Vec<usize>, _>>()?;
        if header.is_some_and(|max| id > max) {
            return Err(syntax(line, format!("id {id} exceeds the declared maximum")));
        }
        let entry = VertexLine {
            line,
            priority,
            owner,
            successors,
            name,
        };
        if vertices.insert(id, entry).is_some() {
            return Err(syntax(line, format!("vertex {id} declared twice")));
        }
    }
    let n = vertices.len();
    if let Some((&id, v)) = vertices.iter().next_back().filter(|(&id, _)| id >= n) {
        return Err(syntax(v.line, format!("ids must be 0..{n}, found {id}")));
    }
    if header.is_some_and(|max| max + 1 != n) {
        return Err(syntax(1, format!("header declares {} vertices, found {n}", header.unwrap() + 1)));
    }
    let mut parts = GameParts::default();
    let mut names = Vec::with_capacity(n);
    for v in vertices.into_values() {
        if let Some(&w) = v.successors.iter().find(|&&w| w >= n) {
            return Err(syntax(v.line, format!("unknown successor {w}")));
        }
        parts.owner.push(v.owner);
        parts.priority.push(v.priority);
        parts.successors.push(v.successors);
        names.push(v.name);
    }
    if names.iter().any(Option::is_some) {
        parts.names = Some(names);
    }
    Ok(parts.build()?)
}

pub fn emit_game(game: &ParityGame) -> String {
    let mut out = String::new();
    writeln!(out, "parity {};", game.vertex_count() - 1).unwrap();
    for v in game.vertices() {
        let succ: Vec<String> = game.successors(v).iter().map(usize::to_string).collect();
        write!(out, "{} {} {} {}", v, game.priority(v), game.owner(v).index(), succ.join(",")).unwrap();
        if let Some(name) = game.name(v) {
            write!(out, " \"{name}\"").unwrap();
        }
        out.push_str(";\n");
    }
    out
}

fn members(set: &FixedBitSet) -> String {
    set.ones().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

fn edges(strategy: &Option<Strategy>) -> String {
    match strategy {
        Some(s) => s.choice.iter().map(|(v, w)| format!("{v}->{w}")).collect::<Vec<_>>().join(" "),
        None => "none".to_string(),
    }
}

/// The text format carries winners and strategy choices only. The
/// structured format is one `key: value` pair per line: `algorithm`,
/// `vertices`, `winning_even`, `winning_odd` (space-separated ids),
/// `strategy_even`, `strategy_odd` (`v->w` pairs or `none`), `wall_time_us`
/// and then every operation counter.
pub fn emit_solution(report: &SolveReport, format: SolutionFormat) -> String {
    assert!(report.is_partition(), "winning sets must partition the vertices");
    let n = report.vertex_count();
    let mut out = String::new();
    match format {
        SolutionFormat::Text => {
            writeln!(out, "paritysol {};", n - 1).unwrap();
            for v in 0..n {
                let (winner, strategy) = if report.winning_even.contains(v) {
                    (Player::Even, &report.strategy_even)
                } else {
                    (Player::Odd, &report.strategy_odd)
                };
                write!(out, "{} {}", v, winner.index()).unwrap();
                if let Some(w) = strategy.as_ref().and_then(|s| s.get(v)) {
                    write!(out, " {w}").unwrap();
                }
                out.push_str(";\n");
            }
        }
        SolutionFormat::Structured => {
            writeln!(out, "algorithm: {}", report.algorithm).unwrap();
            writeln!(out, "vertices: {n}").unwrap();
            writeln!(out, "winning_even: {}", members(&report.winning_even)).unwrap();
            writeln!(out, "winning_odd: {}", members(&report.winning_odd)).unwrap();
            writeln!(out, "strategy_even: {}", edges(&report.strategy_even)).unwrap();
            writeln!(out, "strategy_odd: {}", edges(&report.strategy_odd)).unwrap();
            writeln!(out, "wall_time_us: {}", report.wall_time.as_micros()).unwrap();
            for (key, value) in report.counters.entries() {
                writeln!(out, "{key}: {value}").unwrap();
            }
        }
    }
    out
}

/// A solution read back from the text format.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub winner: Vec<Player>,
    pub strategy_even: Strategy,
    pub strategy_odd: Strategy,
}

impl Solution {
    pub fn winning_set(&self, player: Player) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(self.winner.len());
        out.extend((0..self.winner.len()).filter(|&v| self.winner[v] == player));
        out
    }
}

pub fn parse_solution(text: &str) -> Result<Solution, ParseError> {
    let mut header: Option<usize> = None;
    let mut winners: BTreeMap<usize, (usize, Player)> = BTreeMap::new();
    let mut strategy_even = Strategy::new(Player::Even);
    let mut strategy_odd = Strategy::new(Player::Odd);
    for (line, body) in statements(text) {
        let body = body?;
        if let Some(rest) = body.strip_prefix("paritysol ") {
            if header.is_some() || !winners.is_empty() {
                return Err(syntax(line, "header must come first"));
            }
            header = Some(number(line, "maximal id", Some(rest.trim()))?);
            continue;
        }
        let mut tokens = body.split_whitespace();
        let id: usize = number(line, "vertex id", tokens.next())?;
        let winner = match number::<usize>(line, "winner", tokens.next())? {
            0 => Player::Even,
            1 => Player::Odd,
            w => return Err(syntax(line, format!("winner must be 0 or 1, not {w}"))),
        };
        if let Some(token) = tokens.next() {
            let w = number(line, "strategy successor", Some(token))?;
            match winner {
                Player::Even => strategy_even.choice.insert(id, w),
                Player::Odd => strategy_odd.choice.insert(id, w),
            };
        }
        if tokens.next().is_some() {
            return Err(syntax(line, "trailing tokens"));
        }
        if winners.insert(id, (line, winner)).is_some() {
            return Err(syntax(line, format!("vertex {id} listed twice")));
        }
    }
    let n = winners.len();
    if let Some((&id, &(line, _))) = winners.iter().next_back().filter(|(&id, _)| id >= n) {
        return Err(syntax(line, format!("ids must be 0..{n}, found {id}")));
    }
    if header.is_some_and(|max| max + 1 != n) {
        return Err(syntax(1, format!("header declares {} vertices, found {n}", header.unwrap() + 1)));
    }
    Ok(Solution {
        winner: winners.into_values().map(|(_, p)| p).collect(),
        strategy_even,
        strategy_odd,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::tests::example;
    use crate::generate::gen_random;
    use crate::solve::{solve, AlgoChoice, SolveOptions};

    const EXAMPLE_TEXT: &str = "parity 7;
0 1 0 1 \"a\";
1 0 1 0,3 \"b\";
2 1 0 1,3 \"c\";
3 0 0 5 \"d\";
4 3 1 3 \"e\";
5 4 1 6 \"f\";
6 2 0 4 \"g\";
7 1 0 2,6 \"h\";
";

    #[test]
    fn example_round_trip() {
        let g = parse_pgsolver(EXAMPLE_TEXT).unwrap();
        assert_eq!(g.name(7), Some("h"));
        assert_eq!(emit_game(&g), EXAMPLE_TEXT);
        let plain = example();
        let back = parse_pgsolver(&emit_game(&plain)).unwrap();
        assert_eq!(back, plain);
    }

    #[test]
    fn random_round_trip() {
        for seed in 0..30 {
            let n = 1 + seed as usize % 11;
            let g = gen_random(n, 4, 1, n.min(2), seed).unwrap();
            assert_eq!(parse_pgsolver(&emit_game(&g)).unwrap(), g);
        }
    }

    #[test]
    fn small_inputs() {
        let g = parse_pgsolver("0 1 0 0;").unwrap();
        assert_eq!(g.vertex_count(), 1);
        assert_eq!(g.successors(0), &[0]);
        let g = parse_pgsolver("start 1;\n1 2 1 0;\n\n0 3 0 1 ;\n").unwrap();
        assert_eq!(g.priority(0), 3);
        assert_eq!(g.owner(1), Player::Odd);
    }

    #[test]
    fn rejected_inputs() {
        let err = |text: &str| match parse_pgsolver(text) {
            Err(ParseError::Syntax { line, reason }) => (line, reason),
            other => panic!("{text:?} gave {other:?}"),
        };
        assert_eq!(err("0 1 0 ;"), (1, "empty successor list".to_string()));
        assert_eq!(err("0 1 0 0;\n1 1 0 7;").0, 2);
        assert_eq!(err("0 1 0 0").1, "missing ';'");
        assert_eq!(err("0 1 2 0;").1, "owner must be 0 or 1, not 2");
        assert_eq!(err("0 1 0 0;\n0 1 0 0;").1, "vertex 0 declared twice");
        assert_eq!(err("0 1 0 0;\n2 1 0 0;").0, 2);
        assert_eq!(err("0 x 0 0;").1, "bad priority \"x\"");
        assert_eq!(err("0 1 0 0,,0;").1, "missing successor");
        assert_eq!(err("parity 3;\n0 1 0 0;").0, 1);
        assert_eq!(err("0 1 0 0 \"a;").1, "malformed name");
    }

    #[test]
    fn example_solution_lines() {
        let g = example();
        let opts = SolveOptions {
            strategies: true,
            ..SolveOptions::default()
        };
        let run = solve(&g, AlgoChoice::ProgressMeasure, &opts).unwrap();
        let text = emit_solution(&run.report, SolutionFormat::Text);
        assert!(text.starts_with("paritysol 7;\n"));
        assert!(text.lines().any(|l| l == "0 1;" || l.starts_with("0 1 ")));
        assert!(text.lines().any(|l| l == "3 0 5;"));
        let back = parse_solution(&text).unwrap();
        assert_eq!(back.winning_set(Player::Even), run.report.winning_even);
        assert_eq!(Some(&back.strategy_even), run.report.strategy_even.as_ref());
        assert_eq!(Some(&back.strategy_odd), run.report.strategy_odd.as_ref());

        let dump = emit_solution(&run.report, SolutionFormat::Structured);
        assert!(dump.contains("\ncpre_ops: "));
        assert!(dump.contains("\npeak_live_sets: "));
        assert!(dump.contains("winning_even: 2 3 4 5 6 7\n"));
    }

    #[test]
    fn winners_without_strategies() {
        let run = solve(&example(), AlgoChoice::Zielonka, &SolveOptions::default()).unwrap();
        let text = emit_solution(&run.report, SolutionFormat::Text);
        assert!(text.contains("\n0 1;\n") && text.contains("\n3 0;\n"));
        assert!(parse_solution("0 2;").is_err());
        assert!(parse_solution("0 0 1 2;").is_err());
    }

    #[test]
    fn sparse_priorities_solve_alike() {
        let g = parse_pgsolver("0 4 0 1;\n1 7 1 0,2;\n2 0 0 2;\n").unwrap();
        let expected = solve(&g, AlgoChoice::Explicit, &SolveOptions::default()).unwrap();
        for algo in [AlgoChoice::ProgressMeasure, AlgoChoice::Zielonka, AlgoChoice::BigStep] {
            let run = solve(&g, algo, &SolveOptions::default()).unwrap();
            assert_eq!(run.report.winning_even, expected.report.winning_even, "{algo}");
        }
    }
}
