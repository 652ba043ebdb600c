#![allow(dead_code)]

pub mod props;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use polyparam::model::{parse_model, Pta};

/// Small bounded automaton: at most 3 locations, 2 clocks, 2 parameters with
/// bounds within [0, 3]. Invariants are upper bounds with non-negative
/// parameter terms, and every guard implies the target invariant on the
/// clocks it does not reset.
pub fn random_pta(seed: u64) -> Pta {
    generate(seed, false)
}

/// As `random_pta`, but no location has two outgoing edges with one action.
pub fn random_deterministic_pta(seed: u64) -> Pta {
    generate(seed, true)
}

fn generate(seed: u64, deterministic: bool) -> Pta {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let clocks: Vec<String> = (0..rng.gen_range(1..=2)).map(|i| format!("x{i}")).collect();
    let params: Vec<String> = (0..rng.gen_range(1..=2)).map(|i| format!("p{i}")).collect();
    let nlocs = rng.gen_range(2..=3);
    let mut text = format!("clocks: {}\n", clocks.join(", "));
    let bounds: Vec<String> = params
        .iter()
        .map(|p| {
            let hi = rng.gen_range(1..=3);
            let lo = rng.gen_range(0..=hi.min(1));
            format!("{p} in [{lo}, {hi}]")
        })
        .collect();
    text += &format!("params: {}\ninit: l0\n", bounds.join("; "));

    let term = |rng: &mut ChaCha8Rng, nonneg: bool| -> String {
        let p = params.choose(rng).unwrap();
        let c: i64 = if nonneg { rng.gen_range(0..=2) } else { rng.gen_range(-1..=2) };
        match rng.gen_range(0..4) {
            0 => format!("{}", c.max(0) + 1),
            1 => p.clone(),
            2 if c >= 0 => format!("{p} + {c}"),
            2 => format!("{p} - {}", -c),
            _ => format!("2*{p}"),
        }
    };

    let mut invariants: Vec<Vec<(String, String)>> = Vec::new();
    for l in 0..nlocs {
        let mut inv = Vec::new();
        for x in &clocks {
            if rng.gen_bool(0.35) {
                inv.push((x.clone(), term(&mut rng, true)));
            }
        }
        let atoms: Vec<String> = inv.iter().map(|(x, t)| format!("{x} <= {t}")).collect();
        if atoms.is_empty() {
            text += &format!("loc l{l}\n");
        } else {
            text += &format!("loc l{l} inv: {}\n", atoms.join(" & "));
        }
        invariants.push(inv);
    }

    let rels = ["<=", "<", ">=", ">", "<=", ">=", "="];
    let mut outgoing = vec![0usize; nlocs];
    for i in 0..rng.gen_range(2..=5) {
        // The first edges form a chain towards the last location.
        let (src, dst) = if i + 1 < nlocs { (i, i + 1) } else { (rng.gen_range(0..nlocs), rng.gen_range(0..nlocs)) };
        let resets: Vec<String> = clocks.iter().filter(|_| rng.gen_bool(0.4)).cloned().collect();
        let mut guard: Vec<String> = Vec::new();
        for _ in 0..rng.gen_range(1..=2) {
            let x = clocks.choose(&mut rng).unwrap();
            let rel = rels.choose(&mut rng).unwrap();
            guard.push(format!("{x} {rel} {}", term(&mut rng, false)));
        }
        for (x, t) in &invariants[dst] {
            if !resets.contains(x) {
                guard.push(format!("{x} <= {t}"));
            }
        }
        let action = if deterministic {
            outgoing[src] += 1;
            ["a", "b", "c", "d", "e"][outgoing[src] - 1]
        } else {
            ["a", "b", "c"][i % 3]
        };
        text += &format!("edge l{src} -> l{dst} on {action}");
        if !guard.is_empty() {
            text += &format!(" when {}", guard.join(" & "));
        }
        if !resets.is_empty() {
            text += &format!(" reset {{{}}}", resets.join(", "));
        }
        text.push('\n');
    }
    parse_model(&text).unwrap_or_else(|e| panic!("generated model does not parse: {e}\n{text}"))
}
