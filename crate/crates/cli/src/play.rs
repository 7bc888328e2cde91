//! Interactive, single-branch play of a game.
//!
//! At product and coproduct nodes the side owning the node picks one child
//! to follow; the other child is reported and dropped. The transcript is a
//! function of the flags and the sequence of input lines.

use std::io::{BufRead, Write};

use plmu::arena::{omega_wins_finite, omega_wins_lasso, Arena, Owner};
use plmu::game::{nature_pick, path_hash, Strategy};

use crate::args::{PlayArgs, Side};
use crate::{fix_config, load, selected_states, solve, Result, EXIT_OK};

const CAVEAT: &str = "note: at product/coproduct nodes only one focused branch is followed; \
the other branch is reported and abandoned. The full game plays all branches concurrently, \
so the verdict below covers the focused path only.";

fn human_moves(owner: Owner, side: Side) -> bool {
    matches!(
        (owner, side),
        (Owner::P1 | Owner::Branch1, Side::P1) | (Owner::P2 | Owner::Branch2, Side::P2)
    )
}

fn single_move(a: &Arena, s: usize) -> bool {
    match a.owner(s) {
        Owner::Nature => a.support(s).count() == 1,
        _ => a.edges(s).len() == 1,
    }
}

/// If the path ends by re-entering a loop of forced moves, its start index.
fn forced_loop(a: &Arena, path: &[usize]) -> Option<usize> {
    let (&last, init) = path.split_last()?;
    let i = init.iter().rposition(|&s| s == last)?;
    path[i..path.len() - 1].iter().all(|&s| single_move(a, s)).then_some(i)
}

fn verdict(p1_wins: bool) -> &'static str {
    if p1_wins {
        "Player 1 wins"
    } else {
        "Player 2 wins"
    }
}

pub(crate) fn cmd_play(args: &PlayArgs, stdin: &mut dyn BufRead, out: &mut dyn Write) -> Result<i32> {
    let pb = load(&args.inputs)?;
    let cfg = fix_config(&args.fix)?;
    let p = match &args.state {
        Some(_) => selected_states(&pb.model, &args.state)?[0],
        None => 0,
    };
    let s = solve(&pb, &cfg)?;
    let a = &s.arena;
    let side = match args.side {
        Side::P1 => "Player 1",
        Side::P2 => "Player 2",
    };
    writeln!(out, "formula: {}", pb.formula)?;
    writeln!(out, "you play {side}; seed {}; depth limit {}", args.seed, args.depth)?;
    writeln!(out, "{CAVEAT}")?;

    let mut path = vec![a.root(p)];
    let mut line = String::new();
    for step in 0..=args.depth {
        let cur = *path.last().unwrap();
        let owner = a.owner(cur);
        writeln!(out, "step {step}: {} [{owner}, priority {}]", a.describe(cur), a.priority(cur))?;
        if a.is_terminal(cur) {
            let win = omega_wins_finite(a, &path)?;
            writeln!(out, "terminal state reached: {}", verdict(win))?;
            return Ok(EXIT_OK);
        }
        if let Some(i) = forced_loop(a, &path) {
            let win = omega_wins_lasso(a, &path[..i], &path[i..path.len() - 1])?;
            writeln!(out, "the play repeats a forced loop forever: {}", verdict(win))?;
            return Ok(EXIT_OK);
        }
        if step == args.depth {
            break;
        }
        let edges = a.edges(cur);
        let next = if owner == Owner::Nature {
            let t = nature_pick(a, cur, args.seed, path_hash(&path));
            writeln!(out, "  nature moves to {} (probability {})", a.describe(t), a.nature_prob(cur, t))?;
            t
        } else if human_moves(owner, args.side) {
            for (i, &t) in edges.iter().enumerate() {
                writeln!(out, "  [{i}] {}", a.describe(t))?;
            }
            loop {
                write!(out, "choice> ")?;
                out.flush()?;
                line.clear();
                if stdin.read_line(&mut line)? == 0 {
                    writeln!(out)?;
                    writeln!(out, "input ended; session aborted")?;
                    return Ok(EXIT_OK);
                }
                let text = line.trim();
                match text.parse::<usize>().ok().filter(|&i| i < edges.len()) {
                    Some(i) => {
                        writeln!(out, "{i}")?;
                        break edges[i];
                    }
                    None => writeln!(out, "invalid choice `{text}`; enter a number from 0 to {}", edges.len() - 1)?,
                }
            }
        } else {
            let t = s.greedy.choose(a, cur, path_hash(&path)).expect("non-terminal state");
            writeln!(out, "  engine moves to {}", a.describe(t))?;
            t
        };
        if owner.is_branch() {
            for &t in edges.iter().filter(|&&t| t != next) {
                writeln!(out, "  abandoned branch: {}", a.describe(t))?;
            }
        }
        path.push(next);
    }
    writeln!(out, "undetermined at depth limit")?;
    Ok(EXIT_OK)
}
