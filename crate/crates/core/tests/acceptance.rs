//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.
//!
//! Tolerances: exact equality everywhere except the renderer, where
//! coverage samples nearer than 1e-7 to an edge are skipped and point
//! containment is tested in f64.

use std::collections::HashSet;
use std::path::PathBuf;
use std::time::Instant;

use berg_core::berg::{
    all_ones_total, block_word_total, check_symmetry_identities, classify_symmetry, classify_word,
    generator_of_word, parse_word, shapes_of, total_berg_count, ConnectivityMatrix, SymmetryType,
};
use berg_core::bifan::{cutting_word, nonnegative_representatives};
use berg_core::oracle::{
    corpus, hinged_analysis, pick_check, realize_placement, scan_geometry, sweep, CheckOptions,
    OracleGeometry, SweepReport,
};
use berg_core::render::{coverage_count, fundamental_point, render_bipartition, RenderSpec};
use berg_core::report::analyze;
use berg_core::{Mat2Z, WordKind};
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CORPUS_BOUND: i128 = 6;
const SCAN_BOUND: i128 = 4;
const PICK_TRIALS: usize = 1000;
const PICK_SIDE: i128 = 20;
const PICK_SEED: u64 = 0x5eed_0008;
const COVERAGE_SAMPLES: usize = 10_000;
const EDGE_SKIP: f64 = 1e-7;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn main() {
    let started = Instant::now();
    let ms = corpus(CORPUS_BOUND);
    let report = sweep(&ms, CheckOptions { scan_bound: Some(SCAN_BOUND) }).expect("corpus sweep");
    let sweep_secs = started.elapsed().as_secs_f64();

    let results: Vec<(&str, Outcome)> = vec![
        ("1 counting theorem", counting(&report, sweep_secs)),
        ("2 raw placement counts", raw_counts(&report)),
        ("3 anchor values", anchors()),
        ("4 closed forms", closed_forms()),
        ("5 symmetry taxonomy", symmetry()),
        ("6 factorization", factorization(&ms, &report)),
        ("7 fixed points and hinged families", fixed_points(&report)),
        ("8 pick lemma", pick()),
        ("9 renderer", renderer()),
    ];
    let mut failed = 0;
    for (name, o) in &results {
        let tag = if o.ok { "PASS" } else { "FAIL" };
        println!("{tag} criterion {name}: {}", o.detail);
        failed += usize::from(!o.ok);
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

fn counting(r: &SweepReport, secs: f64) -> Outcome {
    let mut bad = 0;
    let mut shapes = 0;
    for c in &r.failures {
        bad += c.count_mismatches();
    }
    shapes += r.shapes;
    outcome(
        bad == 0 && r.matrices > 0,
        format!(
            "{} matrices, {shapes} shapes, {bad} class-count mismatches, cases {:?}, {secs:.2}s",
            r.matrices, r.by_case
        ),
    )
}

fn raw_counts(r: &SweepReport) -> Outcome {
    let bad: usize = r
        .failures
        .iter()
        .flat_map(|c| &c.shapes)
        .filter(|s| !s.raw_match || !s.exclusions_match)
        .count();
    outcome(bad == 0, format!("{bad} shapes with raw or pre-exclusion count off"))
}

/// Connectivity matrices are compared in canonical form: relabelling the two
/// rectangles conjugates C by sigma without changing the partition.
fn anchors() -> Outcome {
    let cm = |k, l, m, n| ConnectivityMatrix::new(k, l, m, n).unwrap().canonical();
    let a = analyze(&Mat2Z::new(0, 1, 1, 1)).unwrap();
    let ok1 = a.word == "1" && a.kind == WordKind::SemiPeriod && a.n == 1 && a.shapes[0].c == cm(0, 1, 1, 1) && a.total == 1;
    let b = analyze(&Mat2Z::new(0, 1, 1, 2)).unwrap();
    let ok2 = b.word == "11"
        && b.kind == WordKind::SemiPeriod
        && b.n == 2
        && b.shapes[0].c == cm(0, 1, 1, 2)
        && b.shapes[1].c == cm(1, 1, 2, 1)
        && b.total == 4;
    // All-ones family [[s, 1], [s(N-s)+1, N-s]], s = 0..N-1, as a multiset.
    let mut family_ok = true;
    for n in 1..=8i128 {
        let g = generator_of_word(&vec![1; n as usize], WordKind::SemiPeriod);
        let mut got: Vec<_> = analyze(&g).unwrap().shapes.iter().map(|s| s.c).collect();
        let mut want: Vec<_> = (0..n).map(|s| cm(s, 1, s * (n - s) + 1, n - s)).collect();
        got.sort();
        want.sort();
        family_ok &= got == want;
    }
    outcome(
        ok1 && ok2 && family_ok,
        format!(
            "golden mean {} total {}, silver {} / {} total {}, all-ones families N=1..8 {}",
            a.shapes[0].c,
            a.total,
            b.shapes[0].c,
            b.shapes[1].c,
            b.total,
            if family_ok { "match" } else { "differ" }
        ),
    )
}

fn closed_forms() -> Outcome {
    let mut bad = Vec::new();
    for n in 1..=8i128 {
        let g = generator_of_word(&vec![1; n as usize], WordKind::SemiPeriod);
        let total = total_berg_count(&g).unwrap();
        // Independent of the library's closed form.
        let expect = if n % 2 == 1 { n * (n * n + 6 * n + 5) / 12 } else { n * (n * n + 6 * n + 8) / 12 };
        if total != expect || all_ones_total(n) != expect {
            bad.push(format!("1^{n}: {total} vs {expect}"));
        }
    }
    let mut words = 0;
    for a in 1..=6i128 {
        for b in 1..=6i128 {
            if a == b {
                continue;
            }
            let mut w = vec![1u8; a as usize];
            w.extend(std::iter::repeat_n(0u8, b as usize));
            let g = generator_of_word(&w, WordKind::Period);
            let cw = cutting_word(&g).unwrap();
            // K = 1 and the word is basic.
            if cw.n != (a + b) as usize || cw.kind != WordKind::Period || cw.k != 1 {
                bad.push(format!("1^{a}0^{b}: not a basic period"));
                continue;
            }
            let total = total_berg_count(&g).unwrap();
            let want = block_word_total(a, b);
            if Ratio::from_integer(total) != want {
                let gap = Ratio::from_integer(total) - want;
                bad.push(format!("1^{a}0^{b}: {total} vs {want} (gap {gap})"));
            }
            words += 1;
        }
    }
    outcome(bad.is_empty() && words >= 10, format!("8 all-ones words, {words} block words, failures {bad:?}"))
}

fn symmetry() -> Outcome {
    let cases = [
        ("110011", WordKind::Period, SymmetryType::I),
        ("11011", WordKind::Period, SymmetryType::II),
        ("1101", WordKind::Period, SymmetryType::III),
        ("110100", WordKind::Period, SymmetryType::IV),
        ("1", WordKind::SemiPeriod, SymmetryType::V),
        ("11", WordKind::SemiPeriod, SymmetryType::VI),
    ];
    let mut bad = Vec::new();
    for (w, kind, want) in cases {
        let word = parse_word(w).unwrap();
        let cw = cutting_word(&generator_of_word(&word, kind)).unwrap();
        let got = classify_symmetry(&cw).symmetry_type;
        let shapes = shapes_of(&cw).unwrap();
        if classify_word(&word, kind).symmetry_type != want || got != want {
            bad.push(format!("{w}: {got}"));
        }
        if let Err(e) = check_symmetry_identities(&cw, &shapes) {
            bad.push(format!("{w}: {e}"));
        }
        // Sequence identity checked here without the library helper:
        // reflections map C_j to the transpose of C_{c+1-j}, up to relabelling.
        let p = cw.full_period();
        let all: Vec<_> = (0..p).map(|j| berg_core::render::shape_at(&cw, j).unwrap().c).collect();
        for r in classify_symmetry(&cw).reflections {
            for j in 0..p {
                let i = (r.center + 1 + p - j) % p;
                if all[i] != all[j].transpose().canonical() {
                    bad.push(format!("{w}: reflection {} at {j}", r.center));
                }
            }
        }
    }
    outcome(bad.is_empty(), format!("6 words, failures {bad:?}"))
}

fn factorization(ms: &[Mat2Z], r: &SweepReport) -> Outcome {
    let fact_bad = r.failures.iter().filter(|c| !c.factorization_ok).count();
    let scan_bad = r.failures.iter().filter(|c| c.scan_ok != Some(true)).count();
    let mut reps_bad = 0;
    for m in ms {
        let cw = cutting_word(m).unwrap();
        let reps = nonnegative_representatives(&cw);
        let distinct: HashSet<_> = reps.iter().collect();
        if distinct.len() != 2 * cw.n || reps.iter().any(|x| !x.is_nonnegative()) {
            reps_bad += 1;
        }
    }
    outcome(
        fact_bad + scan_bad + reps_bad == 0,
        format!("{fact_bad} factorization, {reps_bad} representative, {scan_bad} scan (bound {SCAN_BOUND}) failures"),
    )
}

fn fixed_points(r: &SweepReport) -> Outcome {
    let fp_bad = r.failures.iter().filter(|c| !c.fixed_points_ok).count();
    let shapes = r.failures.iter().flat_map(|c| &c.shapes);
    let markov_bad = shapes.clone().filter(|s| !s.markov_ok || !s.surjective).count();
    let hinged_bad = shapes.filter(|s| !s.hinged_ok).count();

    // Family [[n-1, 1], [n^2-n-1, n]]: largest hinged family attained.
    let mut measured = Vec::new();
    for n in 2..=8i128 {
        let c = ConnectivityMatrix::new(n - 1, 1, n * n - n - 1, n).unwrap();
        let geo = OracleGeometry::new(c, 1);
        let scan = scan_geometry(&geo);
        measured.push((n, hinged_analysis(&scan.admissible, &geo).max_family as i128));
    }
    let family_ok = measured.iter().all(|&(n, got)| got == n + 1);
    outcome(
        fp_bad + markov_bad + hinged_bad == 0 && family_ok,
        format!(
            "{fp_bad} fixed-point, {markov_bad} markov, {hinged_bad} hinged-formula failures; \
             family (n, largest hinged family) {measured:?}, claimed n+1"
        ),
    )
}

fn pick() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(PICK_SEED);
    let mut done = 0;
    let mut bad = 0;
    while done < PICK_TRIALS {
        let mut v = || rng.gen_range(-PICK_SIDE..=PICK_SIDE);
        let (o, a, b) = ([v(), v()], [v(), v()], [v(), v()]);
        match pick_check(o, a, b) {
            Ok(ok) => {
                done += 1;
                bad += usize::from(!ok);
            }
            Err(_) => continue,
        }
    }
    outcome(bad == 0, format!("{done} parallelograms, {bad} failures, seed {PICK_SEED:#x}"))
}

fn radical_inverse(mut i: usize, base: usize) -> f64 {
    let (mut f, mut r) = (1.0, 0.0);
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// Reference shapes: golden mean, a Case 1 shape with its first placement
/// and image overlay, and a Case 3 shape showing both middles.
fn reference_specs() -> Vec<(&'static str, RenderSpec)> {
    let mut out = Vec::new();
    let m = Mat2Z::new(0, 1, 1, 1);
    let sh = shapes_of(&cutting_word(&m).unwrap()).unwrap().remove(0);
    out.push(("golden_mean", RenderSpec::new(sh, &m)));

    for (name, m) in [("cat_placed", Mat2Z::new(2, 1, 1, 1)), ("negative_trace", Mat2Z::new(-3, 1, -1, 0))] {
        let sh = shapes_of(&cutting_word(&m).unwrap()).unwrap().remove(0);
        let geo = OracleGeometry::of_shape(&sh, &m);
        let z = scan_geometry(&geo).admissible[0];
        let mut spec = RenderSpec::new(sh.clone(), &m);
        spec.placement = Some(realize_placement(&sh, &m, z).unwrap());
        spec.show.image_overlay = true;
        spec.show.neighbor_labels = true;
        out.push((name, spec));
    }
    out
}

fn renderer() -> Outcome {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    let mut bad = Vec::new();
    let mut skipped = 0;
    for (name, spec) in reference_specs() {
        let svg = render_bipartition(&spec).unwrap();
        let path = dir.join(format!("{name}.svg"));
        if update {
            std::fs::write(&path, &svg).unwrap();
        }
        match std::fs::read_to_string(&path) {
            Ok(want) if want == svg => {}
            Ok(_) => bad.push(format!("{name}: differs from golden")),
            Err(e) => bad.push(format!("{name}: {e}")),
        }
        for i in 0..COVERAGE_SAMPLES {
            let (x, y) = fundamental_point(&spec.shape, radical_inverse(i + 1, 2), radical_inverse(i + 1, 3));
            match coverage_count(&spec.shape, x, y, EDGE_SKIP) {
                Some(1) => {}
                Some(k) => bad.push(format!("{name}: sample {i} covered {k} times")),
                None => skipped += 1,
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!("3 goldens, {COVERAGE_SAMPLES} samples per shape, {skipped} edge samples skipped, failures {bad:?}"),
    )
}
