//! Acceptance suite: one PASS/FAIL line per criterion, each with its time
//! budget, written to stderr.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use melon::diskmap::canonical_code;
use melon::enumerate::{enumerate_maximal, SearchLimits};
use melon::homology::{
    apply_row_op, apply_transform, certify_inequivalent, delta2, homology_table, relative_short_set, s_profile,
    tables_orbit_equivalent, HomologyTable, RowOp,
};
use melon::io::{watermelon_from_json, watermelon_to_json};
use melon::render::render_svg;
use melon::watermelon::{
    alt_watermelon, equivalence_code, is_saturated, max_arc_count, p_parallel_classes, p_reduce, par, remove_arc,
    short_arcs, standard_watermelon, validate_watermelon, Watermelon,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/v1")
}

fn built(kind: &str, n: usize) -> Watermelon {
    match kind {
        "standard" => standard_watermelon(n).unwrap(),
        _ => alt_watermelon(n).unwrap(),
    }
}

fn constructions() -> Vec<(String, Watermelon)> {
    let mut out: Vec<(String, Watermelon)> = (2..=8).map(|n| (format!("standard_{n}"), built("standard", n))).collect();
    out.extend((4..=8).map(|n| (format!("alt_{n}"), built("alt", n))));
    out
}

fn cardinality() -> Outcome {
    for (name, w) in constructions() {
        ensure(validate_watermelon(&w).is_valid(), || format!("{name} does not validate"))?;
        let n = w.n();
        ensure(w.len() == n * (n - 1) / 2, || format!("{name} has {} arcs", w.len()))?;
    }
    Ok("12 systems valid with n(n-1)/2 arcs".into())
}

fn short_counts() -> Outcome {
    for n in 2..=8 {
        let got = short_arcs(&built("standard", n)).len();
        // two punctures: the single arc isolates both at once
        let want = if n == 2 { 1 } else { n };
        ensure(got == want, || format!("standard_{n} has {got} short arcs"))?;
    }
    for n in 4..=8 {
        let got = short_arcs(&built("alt", n)).len();
        ensure(got == n - 1, || format!("alt_{n} has {got} short arcs"))?;
    }
    Ok("standard n, alt n-1 for n = 3..8".into())
}

fn golden_table() -> Outcome {
    let t = homology_table(&built("standard", 6));
    let csv = t.to_csv();
    let golden = std::fs::read_to_string(fixtures().join("standard_6_table.csv")).map_err(|e| e.to_string())?;
    ensure(csv == golden, || "CSV differs from the golden file".into())?;
    let rows: Vec<&str> = csv.lines().collect();
    ensure(rows[1].split(',').skip(1).all(|x| x == "1"), || "row g0 is not all ones".into())?;
    ensure(rows[7].split(',').skip(1).all(|x| x == "0"), || "row g6 is not all zeros".into())?;
    // each middle row of a long column is a contiguous block
    for c in 1..t.len() {
        let bits: String = rows[2..7].iter().map(|r| r.split(',').nth(c + 1).unwrap()).collect();
        let trimmed = bits.trim_matches('0');
        ensure(!trimmed.contains('0'), || format!("column {c} is not a block: {bits}"))?;
    }
    Ok("byte-exact CSV, block rows".into())
}

/// `#S` of every column by direct comparison of coefficient strings.
fn brute_profile(t: &HomologyTable) -> (Vec<usize>, BTreeMap<usize, usize>) {
    let n = t.n();
    let strings: Vec<Vec<u8>> = t.vectors().map(|v| v.to_bit_string().into_bytes()).collect();
    let dist = |a: &[u8], b: &[u8]| {
        let d = (1..=n).filter(|&i| a[i] != b[i]).count();
        d.min(n - d)
    };
    let counts: Vec<usize> = (0..strings.len())
        .map(|i| (0..strings.len()).filter(|&j| j != i && dist(&strings[i], &strings[j]) == 1).count())
        .collect();
    let mut profile = BTreeMap::new();
    for &c in &counts {
        *profile.entry(c).or_insert(0) += 1;
    }
    (counts, profile)
}

fn s_profiles() -> Outcome {
    for n in 6..=8 {
        let t = homology_table(&built("standard", n));
        let (_, brute) = brute_profile(&t);
        let formula = BTreeMap::from([(n, 1), (3, n), (4, n * (n - 1) / 2 - n)]);
        ensure(brute == formula, || format!("standard_{n} profile {brute:?}"))?;
        ensure(s_profile(&t) == brute, || format!("library profile differs at n = {n}"))?;
        let alt = homology_table(&built("alt", n));
        let (counts, _) = brute_profile(&alt);
        ensure(counts[0] == n - 1, || format!("alt_{n} mark has #S = {}", counts[0]))?;
        ensure(relative_short_set(&alt, 0).unwrap().len() == n - 1, || "library #S of alt mark".into())?;
    }
    Ok("standard {n:1, 3:n, 4:rest}; alt mark #S = n-1 for n = 6..8".into())
}

fn certificates() -> Outcome {
    for n in 6..=8 {
        let cert = certify_inequivalent(&built("standard", n), &built("alt", n), false)
            .map_err(|e| e.to_string())?
            .ok_or(format!("no certificate at n = {n}"))?;
        ensure(cert.distinguishing_value == Some(n - 1), || format!("n = {n}: value {:?}", cert.distinguishing_value))?;
    }
    let search =
        tables_orbit_equivalent(&homology_table(&built("standard", 6)), &homology_table(&built("alt", 6)), false)
            .map_err(|e| e.to_string())?;
    ensure(search.witness.is_none(), || "orbit search found a witness at n = 6".into())?;
    ensure(search.transforms_tried == 46_080, || format!("searched {} transforms", search.transforms_tried))?;
    Ok("certificates n = 6..8 (values 5, 6, 7); n = 6 search exhausted 46080 transforms".into())
}

fn limits() -> SearchLimits {
    SearchLimits { node_budget: 10_000_000, allow_n5: true, ..SearchLimits::default() }
}

fn enumeration_ground_truth() -> Outcome {
    for (n, want) in [(2, 1), (3, 1)] {
        let e = enumerate_maximal(n, &limits()).map_err(|e| e.to_string())?;
        ensure(e.classes.len() == want, || format!("n = {n}: {} classes", e.classes.len()))?;
    }
    let e = enumerate_maximal(4, &limits()).map_err(|e| e.to_string())?;
    let shorts: BTreeSet<usize> = e.classes.iter().map(|c| c.short_arc_count).collect();
    ensure(e.classes.len() == 2 && shorts == BTreeSet::from([3, 4]), || {
        format!("n = 4: {} classes, short counts {shorts:?}", e.classes.len())
    })?;
    Ok(format!("1, 1, 2 classes; n = 4 short counts {{4, 3}} after {} nodes", e.nodes))
}

fn n4_orbit() -> Outcome {
    let e = enumerate_maximal(4, &limits()).map_err(|e| e.to_string())?;
    let t1 = homology_table(&e.classes[0].representative);
    let t2 = homology_table(&e.classes[1].representative);
    let search = tables_orbit_equivalent(&t1, &t2, false).map_err(|e| e.to_string())?;
    let witness = search.witness.ok_or("no witness between the n = 4 classes")?;
    ensure(witness.verify(&t1, &t2), || "witness does not replay".into())?;
    let ops: Vec<String> = witness.row_ops().iter().map(ToString::to_string).collect();
    Ok(format!("witness [{}] re-verified", ops.join(" ")))
}

fn crossings(w: &Watermelon, a: melon::diskmap::ArcId, b: melon::diskmap::ArcId) -> usize {
    let key = if a < b { (a, b) } else { (b, a) };
    w.crossing_counts().get(&key).copied().unwrap_or(0)
}

/// Checks the puncture-filling facts on a maximal system on `D_5`. The size and
/// short-preimage statements concern punctures no short arc isolates.
fn structure_of_five(w: &Watermelon) -> Result<(), String> {
    let short = short_arcs(w);
    let short_in_w: BTreeSet<_> = short.iter().map(|&(id, _)| id).collect();
    let isolated: BTreeSet<_> = short.iter().map(|&(_, p)| p).collect();
    for p in 1..=5 {
        let reduced = p_reduce(w, p).map_err(|e| e.to_string())?;
        ensure(is_saturated(&reduced), || format!("P{p}-reduction is not saturated"))?;
        let classes = p_parallel_classes(w, p).map_err(|e| e.to_string())?;
        for class in &classes.classes {
            ensure(class.len() <= 2, || format!("P{p}-parallel class of size {}", class.len()))?;
            if let [a, b] = class[..] {
                ensure(crossings(w, a, b) == 0, || format!("P{p}-parallel members {a} and {b} cross"))?;
            }
        }
        if isolated.contains(&p) {
            continue;
        }
        ensure(reduced.len() == 6, || format!("P{p}-reduction has {} arcs", reduced.len()))?;
        for (id, _) in short_arcs(&reduced) {
            let preimage = classes.classes.iter().find(|c| c.contains(&id)).ok_or(format!("{id} has no preimage"))?;
            ensure(preimage.iter().any(|a| short_in_w.contains(a)), || {
                format!("P{p}: reduced short arc {id} has no short preimage")
            })?;
        }
    }
    Ok(())
}

fn five_structure() -> Outcome {
    let e = enumerate_maximal(5, &limits()).map_err(|e| e.to_string())?;
    let mut systems = vec![built("standard", 5), built("alt", 5)];
    systems.extend(e.classes.iter().map(|c| c.representative.clone()));
    for (k, w) in systems.iter().enumerate() {
        structure_of_five(w).map_err(|m| format!("system {k}: {m}"))?;
    }
    let tables: Vec<_> = e.classes.iter().map(|c| homology_table(&c.representative)).collect();
    for i in 0..tables.len() {
        for j in i + 1..tables.len() {
            let search = tables_orbit_equivalent(&tables[i], &tables[j], false).map_err(|e| e.to_string())?;
            let ok = search.witness.is_some_and(|w| w.verify(&tables[i], &tables[j]));
            ensure(ok, || format!("classes {i} and {j} are not table-orbit-equivalent"))?;
        }
    }
    let shorts: Vec<usize> = e.classes.iter().map(|c| c.short_arc_count).collect();
    Ok(format!(
        "{} systems checked; full enumeration: {} classes (short counts {shorts:?}), pairwise orbit-equivalent",
        systems.len(),
        e.classes.len()
    ))
}

fn reduction_identity() -> Outcome {
    for n in 4..=8 {
        let reduced = p_reduce(&built("alt", n), n as u32).map_err(|e| e.to_string())?;
        let target = built("standard", n - 1);
        ensure(canonical_code(reduced.map(), false, false) == canonical_code(target.map(), false, false), || {
            format!("n = {n}: canonical codes differ")
        })?;
    }
    Ok("P_n-reduction of alt_n matches standard_(n-1) for n = 4..8".into())
}

fn random_subsystem(rng: &mut StdRng, corpus: &[Watermelon]) -> Watermelon {
    let w = corpus.choose(rng).unwrap();
    let doomed: Vec<_> = w.arcs().iter().filter(|_| rng.gen_bool(0.4)).map(|a| a.id).collect();
    doomed.into_iter().fold(w.clone(), |w, id| remove_arc(&w, id).unwrap())
}

fn property_suites() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0);
    let mut corpus: Vec<Watermelon> = constructions().into_iter().map(|(_, w)| w).collect();
    for n in 2..=5 {
        corpus.extend(
            enumerate_maximal(n, &limits()).map_err(|e| e.to_string())?.classes.into_iter().map(|c| c.representative),
        );
    }
    for trial in 0..200 {
        let w = random_subsystem(&mut rng, &corpus);
        let mut parts: Vec<_> = w.arcs().iter().map(|a| par(&w, a.id).unwrap()).collect();
        parts.sort();
        parts.dedup();
        ensure(parts.len() == w.len(), || format!("trial {trial}: Par not injective"))?;
        let short: Vec<_> = short_arcs(&w).into_iter().map(|(id, _)| id).collect();
        for (i, &a) in short.iter().enumerate() {
            for &b in &short[i + 1..] {
                ensure(crossings(&w, a, b) == 0, || format!("trial {trial}: short arcs cross"))?;
            }
        }
    }
    for trial in 0..100 {
        let t = homology_table(corpus.choose(&mut rng).unwrap());
        let n = t.n();
        let mut moved = t.clone();
        for _ in 0..8 {
            let op = if rng.gen_bool(0.5) {
                let i = rng.gen_range(1..n);
                RowOp::Swap(i, rng.gen_range(i + 1..=n))
            } else {
                RowOp::Slide(rng.gen_range(1..=n))
            };
            moved = apply_row_op(&moved, op).unwrap();
        }
        let (vs, ms): (Vec<_>, Vec<_>) = (t.vectors().collect(), moved.vectors().collect());
        for i in 0..vs.len() {
            for j in 0..vs.len() {
                let d = delta2(&vs[i], &vs[j]).unwrap();
                ensure(delta2(&ms[i], &ms[j]).unwrap() == d, || format!("trial {trial}: row ops change δ₂"))?;
                ensure(delta2(&vs[i].flipped(), &vs[j]).unwrap() == d, || format!("trial {trial}: mode changes δ₂"))?;
            }
            for k in relative_short_set(&t, i).unwrap() {
                ensure(relative_short_set(&t, k).unwrap().contains(&i), || format!("trial {trial}: S not symmetric"))?;
            }
        }
    }
    let small: Vec<&Watermelon> = corpus.iter().filter(|w| w.n() <= 6).collect();
    let mut recovered = 0;
    for _ in 0..100 {
        let t = homology_table(small.choose(&mut rng).unwrap());
        let n = t.n();
        let mut perm: Vec<usize> = (1..=n).collect();
        perm.shuffle(&mut rng);
        let slides: Vec<usize> = (1..=n).filter(|_| rng.gen_bool(0.5)).collect();
        let moved = apply_transform(&t, &perm, &slides);
        let search = tables_orbit_equivalent(&t, &moved, false).map_err(|e| e.to_string())?;
        if search.witness.is_some_and(|w| w.verify(&t, &moved)) {
            recovered += 1;
        }
    }
    ensure(recovered == 100, || format!("orbit round trip recovered {recovered}/100"))?;
    Ok("Par injectivity, disjoint short arcs, δ₂ invariance, S symmetry; 100/100 scrambles recovered".into())
}

fn serialization() -> Outcome {
    let mut files = 0;
    for entry in std::fs::read_dir(fixtures()).map_err(|e| e.to_string())? {
        let path = entry.map_err(|e| e.to_string())?.path();
        let name = path.file_stem().unwrap().to_string_lossy().to_string();
        let Some((kind, n)) = name.split_once('_') else { continue };
        let Ok(n) = n.parse::<usize>() else { continue };
        if path.extension().is_none_or(|x| x != "json") {
            continue;
        }
        let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
        let w = watermelon_from_json(&text).map_err(|e| format!("{name}: {e}"))?;
        ensure(format!("{}\n", watermelon_to_json(&w)) == text, || format!("{name} does not round-trip"))?;
        let fresh = built(kind, n);
        ensure(canonical_code(w.map(), true, false) == canonical_code(fresh.map(), true, false), || {
            format!("{name}: code differs from a fresh build")
        })?;
        ensure(equivalence_code(&w, true, false) == equivalence_code(&fresh, true, false), || {
            format!("{name}: class code differs from a fresh build")
        })?;
        files += 1;
    }
    ensure(files == 12, || format!("found {files} construction fixtures"))?;
    for (name, w) in constructions() {
        let t = homology_table(&w);
        let json = |t: &HomologyTable| serde_json::to_string_pretty(t).unwrap();
        ensure(t.to_csv() == homology_table(&w).to_csv(), || format!("{name}: CSV not deterministic"))?;
        ensure(json(&t) == json(&homology_table(&w)), || format!("{name}: JSON not deterministic"))?;
        ensure(render_svg(&w) == render_svg(&w), || format!("{name}: SVG not deterministic"))?;
        ensure(watermelon_to_json(&w) == watermelon_to_json(&built(&name[..name.find('_').unwrap()], w.n())), || {
            format!("{name}: build output not deterministic")
        })?;
    }
    Ok(format!("{files} fixtures round-trip byte for byte; CSV/JSON/SVG repeatable"))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 11] = [
        ("cardinality", Duration::from_secs(1), cardinality),
        ("short-arc counts", Duration::from_secs(1), short_counts),
        ("golden table", Duration::from_secs(1), golden_table),
        ("S-profiles", Duration::from_secs(1), s_profiles),
        ("non-uniqueness certificates", Duration::from_secs(30), certificates),
        ("enumeration ground truth", Duration::from_secs(300), enumeration_ground_truth),
        ("n = 4 orbit consistency", Duration::from_secs(60), n4_orbit),
        ("n = 5 structure", Duration::from_secs(600), five_structure),
        ("reduction identity", Duration::from_secs(1), reduction_identity),
        ("property suites", Duration::from_secs(120), property_suites),
        ("serialization", Duration::from_secs(60), serialization),
    ];
    let mut failed = Vec::new();
    for (k, (name, budget, check)) in criteria.into_iter().enumerate() {
        let started = Instant::now();
        let outcome = check();
        let elapsed = started.elapsed();
        let verdict = match &outcome {
            Ok(_) if elapsed > budget => "FAIL",
            Ok(_) => "PASS",
            Err(_) => "FAIL",
        };
        let detail = match outcome {
            Ok(d) => d,
            Err(e) => e,
        };
        let line = format!("criterion {:>2} {verdict} {name}: {detail} ({elapsed:.2?} of {budget:?})\n", k + 1);
        // straight to the stream so the lines show without --nocapture
        std::io::stderr().write_all(line.as_bytes()).unwrap();
        if verdict == "FAIL" {
            failed.push(k + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

#[test]
fn maximal_size_formula() {
    for n in 2..=8 {
        assert_eq!(max_arc_count(n), n * (n - 1) / 2);
    }
}
