//! Acceptance criteria 1 to 10. Each test prints one PASS/FAIL line.

use std::collections::{BTreeSet, HashMap};
use std::io::Write;
use std::sync::Arc;
use std::time::Instant;

use corec::chain::{enumerate_chain, ChainKind};
use corec::finalg::{
    bloom_witness, bounded_corecursive, completely_factorizable, decode_args, find_system, fixpoints, generalized,
    hom_preserves, homomorphisms, idempotents, periodic_points, product, projections, flat_systems, AlgHom,
    FiniteAlgebra,
};
use corec::laws::{run_law, run_monad_law, gen_system, GenBounds, Law, MonadLaw};
use corec::solve::substitute_rhs;
use corec::tree::enumerate_graphs;
use corec::{parse_system, parse_tree, Execution, Name, RatTree, Signature};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn verdict(n: u32, title: &str, pass: bool, detail: &str) {
    let status = if pass { "PASS" } else { "FAIL" };
    // written to the stream directly so the line survives output capture
    let _ = writeln!(std::io::stderr(), "criterion {n} [{title}]: {status} ({detail})");
    assert!(pass, "criterion {n} failed: {detail}");
}

#[test]
fn criterion_01_idempotent_solution() {
    let e = parse_system("sig b\nop */2\nsys\nx = *(x,x)\n").unwrap();
    let x = e.solve_unique().unwrap().get("x").unwrap().clone();
    let pass = x.len() == 1 && x.count_subtrees() == 1 && x.to_string() == "μt0.*(t0,t0)";
    verdict(1, "idempotent solution", pass, &format!("x = {x}, nodes {}", x.len()));
}

#[test]
fn criterion_02_identity_functor_classes() {
    let sig = Signature::new(&[("s", 1)]).unwrap();
    let mut sizes = Vec::new();
    let mut pass = true;
    for n in 1..=6 {
        let trees = enumerate_graphs(&sig, &["y"], n);
        for (i, t) in trees.iter().enumerate() {
            for u in &trees[i + 1..] {
                pass &= !t.bisim_eq(u).unwrap();
            }
        }
        let mut expected: Vec<RatTree> = vec![parse_tree(&sig, "μt.s(t)").unwrap()];
        let mut chain = String::from("y");
        for _ in 0..n - 1 {
            expected.push(parse_tree(&sig, &chain).unwrap());
            chain = format!("s({chain})");
        }
        pass &= trees.len() == n + 1;
        pass &= expected.iter().all(|e| trees.iter().any(|t| t.bisim_eq(e).unwrap()));
        sizes.push(trees.len());
    }
    verdict(2, "identity functor monad", pass, &format!("classes for n=1..6: {sizes:?}"));
}

#[test]
fn criterion_03_chain_cardinalities() {
    let sig = Signature::new(&[("*", 2)]).unwrap();
    let v: Vec<usize> = (0..=3)
        .map(|n| enumerate_chain(&sig, &["y"], n, ChainKind::FreeAlg).unwrap().len())
        .collect();
    let u: Vec<usize> = (0..=2)
        .map(|n| enumerate_chain(&sig, &["y"], n, ChainKind::Corec).unwrap().len())
        .collect();
    let pass = v == [1, 2, 5, 26] && u == [1, 2, 5];
    verdict(3, "chain cardinalities", pass, &format!("V: {v:?}, U: {u:?}"));
}

#[test]
fn criterion_04_strict_solutions() {
    let single = parse_system("sig u\nop s/1\nsys\nx = x\n").unwrap().solve_strict();
    let e = parse_system("sig u\nop s/1\nsys\nx = y\ny = x\nz = s(x)\n").unwrap();
    let sol = e.solve_strict();
    let chain = e.derived_chain();
    let names = |stage: &[usize]| -> Vec<String> { stage.iter().map(|&i| e.vars()[i].to_string()).collect() };
    let stages: Vec<Vec<String>> = chain.stages().iter().map(|s| names(s)).collect();
    let pass = single.get("x").unwrap().to_string() == "bot()"
        && sol.get("x").unwrap().to_string() == "bot()"
        && sol.get("y").unwrap().to_string() == "bot()"
        && sol.get("z").unwrap().to_string() == "s(bot())"
        && stages == [vec!["x", "y", "z"], vec!["x", "y"], vec!["x", "y"]];
    verdict(4, "strict solutions", pass, &format!("z = {}, stages {stages:?}", sol.get("z").unwrap()));
}

#[test]
fn criterion_05_law_suites() {
    let bounds = GenBounds::default();
    let start = Instant::now();
    let mut lines = Vec::new();
    let mut failures = 0;
    for law in Law::ALL {
        let report = run_law(law, 1000, 0, &bounds, Execution::default());
        println!("{}", report.render_details().trim_end());
        failures += report.failures.len();
        lines.push(report.to_string());
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        5,
        "law suites",
        failures == 0 && secs < 60.0,
        &format!("{failures} failures over 5x1000 trials in {secs:.1}s"),
    );
}

#[test]
fn criterion_06_monad_laws() {
    let bounds = GenBounds::default();
    let mut failures = 0;
    for law in MonadLaw::ALL {
        let report = run_monad_law(law, 1000, 0, &bounds, Execution::default());
        println!("{}", report.render_details().trim_end());
        failures += report.failures.len();
    }
    verdict(6, "monad laws", failures == 0, &format!("{failures} failures over 4x1000 trials"));
}

fn unary_algebras(n: usize) -> impl Iterator<Item = FiniteAlgebra> {
    (0..n.pow(n as u32)).map(move |code| FiniteAlgebra::unary(&decode_args(code, n, n)))
}

#[test]
fn criterion_07_unary_characterizations() {
    let mut total = 0;
    let mut bloom_bad = Vec::new();
    let mut core_bad = Vec::new();
    let mut periodic_bad = 0;
    for n in 1..=6 {
        for alg in unary_algebras(n) {
            total += 1;
            let fix = fixpoints(&alg).unwrap();
            let table = alg.table(corec::OpId(0)).to_vec();
            if bloom_witness(&alg, n) != !fix.is_empty() {
                bloom_bad.push(table.clone());
            }
            let core = bounded_corecursive(&alg, n);
            if core != (fix.len() == 1) {
                core_bad.push(table.clone());
            }
            if core != (fix.len() == 1 && periodic_points(&alg).unwrap() == fix) {
                periodic_bad += 1;
            }
        }
    }
    println!("unary algebras checked: {total}");
    println!("bloom witness <=> fixpoint exists: {} discrepancies", bloom_bad.len());
    println!("bounded corecursive <=> unique fixpoint: {} discrepancies", core_bad.len());
    if let Some(table) = core_bad.first() {
        let alg = FiniteAlgebra::unary(table);
        let sys = find_system(&alg, table.len(), |c| c == 1).expect("witness");
        let e = sys.to_system(alg.sig()).unwrap();
        println!(
            "  first counterexample: s = {table:?}, fixpoints {:?}, system with {} solutions:",
            fixpoints(&alg).unwrap(),
            corec::finalg::solutions_of(&e, &alg).unwrap().len()
        );
        for line in e.to_string().lines().skip_while(|l| *l != "sys").skip(1) {
            println!("    {line}");
        }
    }
    println!("bounded corecursive <=> unique fixpoint and no other periodic point: {periodic_bad} discrepancies");
    verdict(
        7,
        "unary characterizations",
        bloom_bad.is_empty() && core_bad.is_empty(),
        &format!(
            "{total} algebras, {} bloom discrepancies, {} corecursive discrepancies",
            bloom_bad.len(),
            core_bad.len()
        ),
    );
}

fn binary_prediction(alg: &FiniteAlgebra) -> bool {
    let idem = idempotents(alg).unwrap();
    idem.len() == 1 && completely_factorizable(alg).unwrap() == idem
}

#[test]
fn criterion_08_binary_characterization() {
    let mut checked = 0;
    let mut bad = Vec::new();
    let mut corecursive = 0;
    for n in 1..=3usize {
        for code in 0..n.pow((n * n) as u32) {
            let alg = FiniteAlgebra::binary(n, &decode_args(code, n, n * n));
            let core = bounded_corecursive(&alg, n);
            corecursive += core as usize;
            if core != binary_prediction(&alg) {
                bad.push(alg);
            }
            checked += 1;
        }
    }
    let exhaustive = checked;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..10_000 {
        let table: Vec<usize> = (0..16).map(|_| rng.gen_range(0..4)).collect();
        let alg = FiniteAlgebra::binary(4, &table);
        let core = bounded_corecursive(&alg, 4);
        corecursive += core as usize;
        if core != binary_prediction(&alg) {
            bad.push(alg);
        }
        checked += 1;
    }
    if let Some(alg) = bad.first() {
        println!("first discrepancy: {}", alg.to_string().replace('\n', "; "));
    }
    verdict(
        8,
        "binary characterization",
        bad.is_empty(),
        &format!(
            "{exhaustive} exhaustive + {} random tables (seed 2024), {corecursive} corecursive, {} discrepancies",
            checked - exhaustive,
            bad.len()
        ),
    );
}

fn mixed_signatures() -> Vec<Arc<Signature>> {
    let decls: [&[(&str, usize)]; 8] = [
        &[("*", 2)],
        &[("s", 1)],
        &[("*", 2), ("c", 0)],
        &[("s", 1), ("c", 0)],
        &[("*", 2), ("s", 1)],
        &[("*", 2), ("s", 1), ("c", 0)],
        &[("f", 3)],
        &[("s", 1), ("t", 1), ("c", 0)],
    ];
    decls.iter().map(|d| Signature::new(d).unwrap()).collect()
}

#[test]
fn criterion_09_closure_properties() {
    let sigs = mixed_signatures();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let (mut product_bad, mut lemma_bad, mut hom_bad) = (0, 0, 0);
    let (mut product_core, mut lemma_core, mut hom_checks) = (0, 0, 0);
    let instances = 1000;
    for _ in 0..instances {
        let sig = sigs[rng.gen_range(0..sigs.len())].clone();
        let pick = |rng: &mut ChaCha8Rng| loop {
            let alg = FiniteAlgebra::random(sig.clone(), rng.gen_range(1..=3), rng);
            if alg.table_size() <= 64 {
                break alg;
            }
        };
        let a = pick(&mut rng);
        let b = pick(&mut rng);

        // products
        let k = 3;
        let (ca, cb) = (bounded_corecursive(&a, k), bounded_corecursive(&b, k));
        let p = product(&a, &b).unwrap();
        let cp = bounded_corecursive(&p, k);
        product_core += (ca && cb) as usize;
        if cp != (ca && cb) {
            product_bad += 1;
        }

        // HA + B
        let extra = rng.gen_range(0..=2);
        let names: Vec<String> = (0..extra).map(|i| format!("b{i}")).collect();
        let f: Vec<usize> = (0..extra).map(|_| rng.gen_range(0..a.size())).collect();
        let g = generalized(&a, &names, &f).unwrap();
        let k = 2;
        let (c1, c2) = (bounded_corecursive(&a, k), bounded_corecursive(&g, k));
        lemma_core += c1 as usize;
        if c1 != c2 {
            lemma_bad += 1;
        }

        // homomorphisms between corecursive algebras preserve solutions
        let mut homs: Vec<AlgHom> = vec![AlgHom::identity(&a)];
        let (pa, pb) = projections(&a, &b).unwrap();
        homs.extend([pa, pb]);
        homs.extend(homomorphisms(&a, &b));
        for h in &homs {
            if !(bounded_corecursive(h.source(), 2) && bounded_corecursive(h.target(), 2)) {
                continue;
            }
            for m in 1..=2 {
                for sys in flat_systems(&sig.ops().iter().map(|d| d.arity).collect::<Vec<_>>(), m).iter() {
                    let e = sys.to_system(&sig).unwrap();
                    hom_checks += 1;
                    if hom_preserves(h, &e) != Ok(true) {
                        hom_bad += 1;
                    }
                }
            }
        }
    }
    println!("products: {product_bad} discrepancies ({product_core} corecursive pairs)");
    println!("HA+B: {lemma_bad} discrepancies ({lemma_core} corecursive bases)");
    println!("homomorphisms: {hom_bad} failures over {hom_checks} (hom, system) checks");
    verdict(
        9,
        "product, HA+B and homomorphism suites",
        product_bad + lemma_bad + hom_bad == 0 && product_core > 0 && lemma_core > 0 && hom_checks > 0,
        &format!("{instances} instances, {} discrepancies", product_bad + lemma_bad + hom_bad),
    );
}

#[test]
fn criterion_10_oracle_coherence() {
    let bounds = GenBounds {
        guarded: 1.0,
        ..GenBounds::default()
    };
    let mut mismatches = 0;
    for seed in 0..500 {
        let e = gen_system(seed, &bounds);
        let sol = e.solve_unique().unwrap();
        let sig = e.sig().clone();
        let mut approx: HashMap<Name, RatTree> =
            e.vars().iter().map(|x| (x.clone(), RatTree::param(sig.clone(), x))).collect();
        for d in 1..=8 {
            approx = e
                .equations()
                .map(|(x, r)| (x.clone(), substitute_rhs(r, &sig, &approx).unwrap()))
                .collect();
            for (x, v) in sol.iter() {
                if approx[x].unfold(d) != v.unfold(d) {
                    mismatches += 1;
                }
            }
        }
    }
    verdict(
        10,
        "oracle coherence",
        mismatches == 0,
        &format!("500 ideal systems, depths 1..=8, {mismatches} mismatches"),
    );
}

#[test]
fn characterization_counterexample_is_reproducible() {
    // 0 is the only fixpoint, but 1 and 2 form a 2-cycle
    let alg = FiniteAlgebra::unary(&[0, 2, 1]);
    let e = parse_system("sig u\nop s/1\nsys\nx = s(y)\ny = s(x)\n").unwrap();
    let sols = corec::finalg::solutions_of(&e, &alg).unwrap();
    assert_eq!(fixpoints(&alg).unwrap(), BTreeSet::from([0]));
    assert_eq!(sols, vec![vec![0, 0], vec![1, 2], vec![2, 1]]);
}
