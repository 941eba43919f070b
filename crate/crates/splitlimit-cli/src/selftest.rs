use splitlimit::asymptotics::{solve_constants, verify_constant_identities};
use splitlimit::enumeration::identities::{verify_identities_with, Options};
use splitlimit::enumeration::{brute_force_count, count_trees};
use splitlimit::sampler::ExactSampler;
use splitlimit::sampler::replicate_rng;
use splitlimit::treecodec::decompose;
use splitlimit::{BigInt, Family};
use std::path::Path;

const GOLDEN: &str = include_str!("../../splitlimit/data/golden_counts.csv");
const GOLDEN_NAME: &str = "golden_counts.csv (built in)";

/// Prints one line per check and returns whether all passed.
pub fn run(golden: Option<&Path>) -> bool {
    let mut results: Vec<(String, Result<(), String>)> = Vec::new();
    let (name, text) = match golden {
        Some(p) => (
            p.display().to_string(),
            std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display())),
        ),
        None => (GOLDEN_NAME.to_string(), Ok(GOLDEN.to_string())),
    };
    results.push((format!("golden counts {name}"), text.and_then(|t| golden_counts(&t)).map_err(|e| format!("{name}: {e}"))));
    results.push(("counts vs brute force, n <= 5".into(), brute_counts()));
    results.push(("series identities to order 15, up to 2 marks".into(), identities()));
    for f in Family::ALL {
        results.push((format!("constants {f} at 64 bits"), constants(f)));
    }
    for f in Family::ALL {
        results.push((format!("round trips {f}, sizes <= 60"), round_trips(f)));
    }
    let mut ok = true;
    for (name, r) in &results {
        match r {
            Ok(()) => println!("pass {name}"),
            Err(e) => {
                ok = false;
                println!("FAIL {name}: {e}");
            }
        }
    }
    ok
}

fn golden_counts(text: &str) -> Result<(), String> {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    if lines.next() != Some("family,n,tree_count,graph_count") {
        return Err("bad header".into());
    }
    let mut rows = 0;
    for (i, line) in lines.enumerate() {
        let cols: Vec<&str> = line.split(',').collect();
        let bad = || format!("malformed row {}: `{line}`", i + 2);
        if cols.len() != 4 {
            return Err(bad());
        }
        let f: Family = cols[0].parse().map_err(|_| bad())?;
        let n: usize = cols[1].parse().map_err(|_| bad())?;
        let want: BigInt = cols[2].parse().map_err(|_| bad())?;
        let got = count_trees(f, n).map_err(|e| e.to_string())?;
        if got != want {
            return Err(format!("row {}: {f} n={n} lists {want}, computed {got}", i + 2));
        }
        rows += 1;
    }
    if rows == 0 {
        return Err("no rows".into());
    }
    Ok(())
}

fn brute_counts() -> Result<(), String> {
    for f in Family::ALL {
        for n in 1..=5 {
            let c = count_trees(f, n).map_err(|e| e.to_string())?;
            let b = brute_force_count(f, n);
            if c != BigInt::from(b) {
                return Err(format!("{f} n={n}: {c} vs {b}"));
            }
        }
    }
    Ok(())
}

fn identities() -> Result<(), String> {
    let opts = Options {
        order: 15,
        derivative_order: 15,
        brute_leaves: 7,
        leaf3_leaves: 8,
        max_marks: 2,
    };
    let rep = verify_identities_with(opts).map_err(|e| e.to_string())?;
    match rep.first_failure() {
        None => Ok(()),
        Some(c) => Err(format!("{}: {}", c.name, c.detail)),
    }
}

fn constants(f: Family) -> Result<(), String> {
    let rep = verify_constant_identities::<f64>(f, 64).map_err(|e| e.to_string())?;
    if let Some(c) = rep.first_failure() {
        return Err(format!("{}: residual {:e}", c.name, c.residual));
    }
    let c = solve_constants::<f64>(f, 64).map_err(|e| e.to_string())?;
    let (gamma, cf) = match f {
        Family::Dh => (3.9258, 0.3602),
        Family::Dh2c => (7.5022, 0.1885),
        Family::Leaf3 => (1.5263, 0.9266),
    };
    if (c.gamma_h - gamma).abs() > 5e-4 || (c.c_f - cf).abs() > 5e-4 {
        return Err(format!("gamma {} c_f {}", c.gamma_h, c.c_f));
    }
    Ok(())
}

fn round_trips(f: Family) -> Result<(), String> {
    let s = ExactSampler::new(f, 60).map_err(|e| e.to_string())?;
    for i in 0..30u64 {
        let mut rng = replicate_rng(2024, i);
        let n = 2 + (i as usize * 7) % 59;
        let t = s.draw_size(n, &mut rng).map_err(|e| e.to_string())?;
        let g = t.gr().map_err(|e| e.to_string())?;
        let back = decompose(&g).map_err(|e| e.to_string())?;
        if back.canonical() != t.canonical() {
            return Err(format!("replicate {i}: decompose(gr(t)) differs from t"));
        }
        let ix = t.index();
        for a in 0..=n as u32 {
            let bfs = g.bfs(a);
            for b in a + 1..=n as u32 {
                let d = ix.distance(a, b).map_err(|e| e.to_string())?;
                if bfs[b as usize] != Some(d) {
                    return Err(format!("replicate {i}: distance({a},{b}) = {d}, BFS {:?}", bfs[b as usize]));
                }
            }
        }
    }
    Ok(())
}
