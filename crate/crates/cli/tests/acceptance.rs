//! One-shot acceptance run: drives `tcm verify` and prints one line per
//! criterion. Thresholds and expected values are pinned here, independently
//! of the checks the binary performs on itself.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use serde_json::Value;

const FGL_DEGREE: u64 = 12;
const FGL_SECONDS: f64 = 30.0;
const LEVEL2_SECONDS: f64 = 300.0;
const GROUPS_SECONDS: f64 = 10.0;
const SUITE_LIMIT: Duration = Duration::from_secs(15 * 60);
const FLAGSHIP_BUDGET: u64 = 4;

fn run(cache: &Path, out: &Path, preset: &str) -> (Option<i32>, Duration) {
    let t0 = Instant::now();
    let st = Command::new(env!("CARGO_BIN_EXE_tcm"))
        .args(["verify", "--preset", preset, "-o"])
        .arg(out)
        .env("TCM_CACHE_DIR", cache)
        .status()
        .expect("tcm runs");
    (st.code(), t0.elapsed())
}

fn read(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

struct Suite {
    report: Value,
    timings: Value,
}

impl Suite {
    /// All checks under `prefix`, requiring at least `min` and every one passing.
    fn checks(&self, prefix: &str, min: usize) -> Result<(), String> {
        let cs: Vec<&Value> = self.report["checks"]
            .as_array()
            .unwrap()
            .iter()
            .filter(|c| c["name"].as_str().unwrap().starts_with(prefix))
            .collect();
        if cs.len() < min {
            return Err(format!("{prefix}: {} checks, expected at least {min}", cs.len()));
        }
        match cs.iter().find(|c| c["status"] != "pass") {
            Some(c) => Err(format!("{} is {}: {}", c["name"], c["status"], c["detail"])),
            None => Ok(()),
        }
    }
    fn has(&self, name: &str) -> Result<(), String> {
        self.checks(name, 1)
    }
    fn result(&self, path: &[&str]) -> &Value {
        path.iter().fold(&self.report["results"], |v, k| &v[*k])
    }
    fn seconds(&self, key: &str) -> f64 {
        self.timings["seconds"][key].as_f64().unwrap_or(f64::INFINITY)
    }
}

/// Degree of a serialized series (sparse `[degree, coefficient]` terms).
fn degree(v: &Value) -> Option<u64> {
    v["terms"].as_array()?.iter().filter_map(|t| t[0].as_u64()).max()
}

fn expect(ok: bool, what: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn c1(s: &Suite) -> Result<(), String> {
    for name in ["unital", "commutative", "associative", "p_series_endomorphism"] {
        s.has(&format!("c1.fgl.axioms.{name}"))?;
    }
    let deg = s.result(&["c1.fgl", "axioms", "degree"]).as_u64();
    expect(deg == Some(FGL_DEGREE), format!("axioms checked to degree {deg:?}"))?;
    let secs = s.seconds("c1.runtime");
    expect(secs < FGL_SECONDS, format!("construction took {secs:.1}s"))?;
    s.has("c1.height_one.multiplicative_closed_form")
}

fn c2(s: &Suite) -> Result<(), String> {
    for name in ["E.monic_degree", "E.multiply_back", "E.mod_p_u2", "Lt.monic_degree", "Lt.multiply_back", "Lt.residue_is_x_power"] {
        s.has(&format!("c2.flagship.{name}"))?;
    }
    let e = degree(s.result(&["c2.flagship", "E_monic"]));
    let l = degree(s.result(&["c2.flagship", "Lt_monic"]));
    expect(e == Some(4) && l == Some(2), format!("monic degrees {e:?}, {l:?}; expected 4 and 2"))
}

fn c3(s: &Suite) -> Result<(), String> {
    for name in ["product", "h_residue", "idempotent_mod_mt", "bezout_mod_mt"] {
        s.has(&format!("c3.flagship.split.{name}"))?;
    }
    s.checks("c3.flagship", 8)
}

fn c4(s: &Suite) -> Result<(), String> {
    for level in ["flagship", "level2"] {
        for name in ["Y_congruent_to_x_power", "g_divides_Y", "j_monic_degree", "j_matches_prepared_quotient", "j_lowest_coefficient", "smoothness"] {
            s.has(&format!("c4.{level}.{name}"))?;
        }
    }
    s.has("c4.flagship.j_residue")?;
    let j1 = degree(s.result(&["c4.flagship", "etale", "j"]));
    let j2 = degree(s.result(&["c4.level2", "etale", "j"]));
    expect(j1 == Some(2) && j2 == Some(4), format!("j degrees {j1:?}, {j2:?}; expected 2 and 4"))?;
    let secs = s.seconds("level2: lambda algebra") + s.seconds("c4.level2.runtime");
    expect(secs < LEVEL2_SECONDS, format!("level-2 étale suite took {secs:.1}s"))
}

fn c5(s: &Suite) -> Result<(), String> {
    for pre in ["flagship", "flagship3"] {
        for alg in ["g", "j"] {
            s.has(&format!("c5.{pre}.subtraction_unit.{alg}"))?;
        }
    }
    Ok(())
}

fn c6(s: &Suite) -> Result<(), String> {
    for case in ["p2_k1", "p3_k1", "p2_k2"] {
        s.has(&format!("c6.{case}.vandermonde"))?;
        s.has(&format!("c6.{case}.pairwise"))?;
    }
    Ok(())
}

fn c7(s: &Suite) -> Result<(), String> {
    for name in ["ring_map", "zero_class_inclusion", "rank_identity", "iso_certificate"] {
        s.has(&format!("c7.G=2.{name}"))?;
    }
    let z2 = s.result(&["c7", "summary G=2"]);
    expect(z2["size"] == 4 && z2["domain_rank"] == 4, format!("Z/2 matrix {z2}"))?;
    let within = z2["iso_exponents"].as_array().is_some_and(|e| e.iter().all(|x| x.as_u64().unwrap() <= FLAGSHIP_BUDGET));
    expect(within, format!("witness exponents {} exceed B = {FLAGSHIP_BUDGET}", z2["iso_exponents"]))?;
    // p^{kn} = p^{kt} · p^{k(n−t)}
    expect(z2["factor_rank"] == 2 && z2["classes"] == 2, format!("rank split {z2}"))?;
    s.has("c7.k_independence")?;
    let k = s.result(&["c7", "k_independence"]);
    expect(k["entries_compared"].as_u64().unwrap_or(0) > 0, "k independence compared no entries")?;
    s.checks("c7.G=2x2", 4)?;
    let v4 = s.result(&["c7", "summary G=2x2"]);
    expect(v4["classes"] == 4 && v4["factor_rank"] == 4 && v4["domain_rank"] == 16, format!("Z/2×Z/2 ranks {v4}"))
}

fn c8(s: &Suite) -> Result<(), String> {
    s.checks("c8", 10)?;
    let s3 = s.result(&["c8.pairs", "S3"]);
    expect(s3["commuting_tuples"] == 10 && s3["classes"].as_array().map(Vec::len) == Some(4), format!("S3 {}", s3["commuting_tuples"]))?;
    expect(s3["centralizer_orders"] == serde_json::json!([6, 2, 2, 2]), format!("S3 centralizers {}", s3["centralizer_orders"]))?;
    let q8 = s.result(&["c8.singles", "Q8"]);
    expect(q8["centralizer_orders"] == serde_json::json!([8, 8, 4, 4, 4]), format!("Q8 centralizers {}", q8["centralizer_orders"]))?;
    for (g, order) in [("Z/2", 2u64), ("Z/4", 4), ("Z/2xZ/2", 4)] {
        let r = &s.result(&["c8.abelian", g])["class_functions"]["total_rank"];
        expect(r.as_u64() == Some(order * order), format!("{g}: total rank {r}"))?;
    }
    let ind = s.result(&["c8", "induction"]).as_array().cloned().unwrap_or_default();
    for (g, h, p) in [("S3", 3, 3), ("D4", 4, 2), ("Q8", 2, 2)] {
        let ok = ind.iter().any(|x| x["group"] == g && x["subgroup_order"] == h && x["p"] == p && x["report"]["match"] == true);
        expect(ok, format!("induction ({g}, |H|={h}, p={p})"))?;
    }
    let secs = s.seconds("c8.runtime");
    expect(secs < GROUPS_SECONDS, format!("groups took {secs:.1}s"))
}

fn c9(s: &Suite) -> Result<(), String> {
    for (label, p) in [("c9.flagship", 2u64), ("c9.p3", 3)] {
        s.checks(label, 3)?;
        let reps = s.result(&[label, "congruences"]).as_array().cloned().unwrap_or_default();
        for h in 0..2u32 {
            for k in 1..=2u32 {
                let want = if h == 0 { k as u64 } else { (p.pow(h * k) - 1) / (p.pow(h) - 1) };
                let got = reps.iter().find(|r| r["h"] == h && r["k"] == k);
                expect(got.is_some_and(|r| r["exponent"] == want && r["pass"] == true), format!("{label}: h={h} k={k}"))?;
            }
        }
    }
    Ok(())
}

fn main() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let t0 = Instant::now();
    let (a, b) = (dir.path().join("flagship-1.json"), dir.path().join("flagship-2.json"));
    let (code, _) = run(&cache, &a, "flagship");
    let (code2, _) = run(&cache, &b, "flagship");
    let mut others = vec![];
    for preset in ["flagship3", "level2"] {
        let out = dir.path().join(format!("{preset}.json"));
        others.push((preset, run(&cache, &out, preset).0, out));
    }
    let total = t0.elapsed();

    let suite = Suite { report: read(&a), timings: read(&dir.path().join("flagship-1.json.timings.json")) };
    let c10 = || -> Result<(), String> {
        expect(code == Some(0) && code2 == Some(0), format!("verify exited {code:?}/{code2:?}"))?;
        expect(std::fs::read(&a).unwrap() == std::fs::read(&b).unwrap(), "reports differ between runs")?;
        for (preset, code, out) in &others {
            expect(*code == Some(0), format!("{preset} exited {code:?}: {}", read(out)["summary"]))?;
        }
        expect(total < SUITE_LIMIT, format!("suite took {:.0}s", total.as_secs_f64()))
    };
    let criteria: [(&str, Result<(), String>); 10] = [
        ("formal group law", c1(&suite)),
        ("Weierstrass preparation", c2(&suite)),
        ("connected–étale splitting", c3(&suite)),
        ("étale data", c4(&suite)),
        ("subtraction units", c5(&suite)),
        ("Vandermonde / localization", c6(&suite)),
        ("character map", c7(&suite)),
        ("finite groups", c8(&suite)),
        ("congruences", c9(&suite)),
        ("determinism and total time", c10()),
    ];
    let mut failed = vec![];
    for (i, (name, r)) in criteria.iter().enumerate() {
        match r {
            Ok(()) => println!("criterion {:>2} PASS  {name}", i + 1),
            Err(e) => {
                println!("criterion {:>2} FAIL  {name}: {e}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    println!("total {:.1}s", total.as_secs_f64());
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
