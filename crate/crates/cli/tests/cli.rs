use std::fs;
use std::path::PathBuf;
use std::process::Command;

use corec::{parse_system, parse_tree, parse_tree_file};
use corec_cli::{run, Outcome, EXIT_FAIL, EXIT_OK, EXIT_USAGE};
use tempfile::TempDir;

struct Files(TempDir);

impl Files {
    fn new() -> Self {
        Files(tempfile::tempdir().unwrap())
    }

    fn put(&self, name: &str, body: &str) -> String {
        let p: PathBuf = self.0.path().join(name);
        fs::write(&p, body).unwrap();
        p.to_str().unwrap().to_string()
    }
}

fn corec(args: &[&str]) -> Outcome {
    run(std::iter::once("corec").chain(args.iter().copied()))
}

#[test]
fn solve_idempotent() {
    let f = Files::new();
    let p = f.put("idem.sys", "sig b\nop */2\nsys\nx = *(x,x)\n");
    let out = corec(&["solve", &p]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    assert_eq!(out.stdout, "x = μt0.*(t0,t0)\n");
}

#[test]
fn solve_strict_sends_unguarded_to_bottom() {
    let f = Files::new();
    let p = f.put("xx.sys", "sig u\nop s/1\nsys\nx = x\n");
    assert_eq!(corec(&["solve", "--strict", &p]).stdout, "x = bot()\n");

    let p = f.put("g.sys", "sig u\nop s/1\nsys\nx = y\ny = x\nz = s(x)\n");
    let out = corec(&["solve", "--strict", &p]);
    assert_eq!(out.stdout, "x = bot()\ny = bot()\nz = s(bot())\n");
}

#[test]
fn general_system_without_strict_names_the_variables() {
    let f = Files::new();
    let p = f.put("g.sys", "sig u\nop s/1\nsys\nx = y\ny = x\nz = s(x)\n");
    let out = corec(&["solve", &p]);
    assert_eq!(out.code, EXIT_USAGE);
    assert!(out.stdout.is_empty());
    assert!(out.stderr.contains("x, y"), "{}", out.stderr);
    assert!(!out.stderr.contains("z"), "{}", out.stderr);
    assert!(out.stderr.contains("--strict"));
}

#[test]
fn parse_errors_exit_2_with_line_numbers() {
    let f = Files::new();
    let p = f.put("bad.sys", "sig b\nop */2\nsys\nx = *(x)\n");
    let out = corec(&["solve", &p]);
    assert_eq!(out.code, EXIT_USAGE);
    assert!(out.stderr.contains("line 4"), "{}", out.stderr);

    let p = f.put("unknown.sys", "sig b\nop */2\nsys\nx = *(x,w)\n");
    let out = corec(&["solve", &p]);
    assert_eq!(out.code, EXIT_USAGE);
    assert!(out.stderr.contains('w'), "{}", out.stderr);

    let out = corec(&["solve", "/definitely/not/here.sys"]);
    assert_eq!(out.code, EXIT_USAGE);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(corec(&[]).code, EXIT_USAGE);
    assert_eq!(corec(&["chain", "x.sig", "--kind", "sideways", "--level", "1"]).code, EXIT_USAGE);
    assert_eq!(corec(&["laws", "--trials", "many"]).code, EXIT_USAGE);
    assert_eq!(corec(&["laws", "--law", "nope"]).code, EXIT_USAGE);
    assert_eq!(corec(&["laws", "--max-vars", "0"]).code, EXIT_USAGE);
}

#[test]
fn eq_exit_codes() {
    let f = Files::new();
    let a = f.put("a.tree", "sig b\nop */2\ntree μt.*(t,t)\n");
    let b = f.put("b.tree", "sig b\nop */2\ntree *(μt.*(t,t),μu.*(u,*(u,u)))\n");
    let c = f.put("c.tree", "sig b\nop */2\nparams y\ntree *(y,y)\n");
    let out = corec(&["eq", &a, &b]);
    assert_eq!((out.code, out.stdout.as_str()), (EXIT_OK, "equal\n"));
    let out = corec(&["eq", &a, &c]);
    assert_eq!((out.code, out.stdout.as_str()), (EXIT_FAIL, "not equal\n"));
    let out = corec(&["eq", &c, &c, "--format", "json"]);
    assert_eq!(out.code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["v"], 1);
    assert_eq!(v["equal"], true);
}

#[test]
fn unfold_prints_the_partial_term() {
    let f = Files::new();
    let p = f.put("s.tree", "sig u\nop s/1\nparams y\ntree μt.s(t)\n");
    assert_eq!(corec(&["unfold", &p, "--depth", "3"]).stdout, "s(s(s(…)))\n");
    assert_eq!(corec(&["unfold", &p, "--depth", "0"]).stdout, "…\n");
}

#[test]
fn chain_levels() {
    let f = Files::new();
    let unary = f.put("u.sig", "sig u\nop s/1\nparams y\n");
    let out = corec(&["chain", &unary, "--kind", "corec", "--level", "2"]);
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.ends_with("cardinality 3\n"), "{}", out.stdout);

    let binary = f.put("b.sig", "sig b\nop */2\nparams y\n");
    let cards: Vec<String> = (0..=3)
        .map(|n| {
            let out = corec(&["chain", &binary, "--kind", "freealg", "--level", &n.to_string(), "--format", "json"]);
            let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
            assert_eq!(v["v"], 1);
            v["cardinality"].to_string()
        })
        .collect();
    assert_eq!(cards, ["1", "2", "5", "26"]);

    let mixed = f.put("m.sig", "sig m\nop */2\nop c/0\nparams y\n");
    let out = corec(&["chain", &mixed, "--kind", "corec", "--level", "0"]);
    assert_eq!(out.code, EXIT_USAGE);
    assert!(out.stderr.contains("infinite"), "{}", out.stderr);
}

#[test]
fn laws_pass_and_are_deterministic() {
    let args = ["laws", "--trials", "60", "--seed", "7"];
    let first = corec(&args);
    assert_eq!(first.code, EXIT_OK, "{}", first.stdout);
    assert_eq!(first.stdout.lines().count(), 9);
    assert!(first.stdout.lines().all(|l| l.ends_with("trials=60 failures=0")));
    assert_eq!(corec(&args), first);
    let sequential = corec(&["laws", "--trials", "60", "--seed", "7", "--sequential"]);
    assert_eq!(sequential.stdout, first.stdout);

    let out = corec(&["laws", "--law", "double", "--trials", "20", "--max-vars", "2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["v"], 1);
    assert_eq!(v["reports"][0]["law"], "double");
    assert_eq!(v["reports"][0]["failures"].as_array().unwrap().len(), 0);
}

#[test]
fn alg_check_reports() {
    let f = Files::new();
    let cycle = f.put("s.alg", "sig u\nop s/1\ncarrier a b c\ntable s: a->a b->c c->b\n");
    let out = corec(&["alg", "check", &cycle]);
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.contains("bounded_corecursive: false"), "{}", out.stdout);
    assert!(out.stdout.contains("fixpoints: {a}"));
    assert!(out.stdout.contains("witness: 3 solutions"));

    let zero = f.put("z.alg", "sig b\nop */2\ncarrier a b\ntable *: a,a->a a,b->a b,a->a b,b->a\n");
    let out = corec(&["alg", "check", &zero, "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["v"], 1);
    assert_eq!(v["bounded_corecursive"], true);
    assert_eq!(v["idempotents"], serde_json::json!(["a"]));
    assert_eq!(v["completely_factorizable"], serde_json::json!(["a"]));
    assert!(v.get("witness").is_none());

    let bad = f.put("bad.alg", "sig u\nop s/1\ncarrier a b\ntable s: a->b\n");
    assert_eq!(corec(&["alg", "check", &bad]).code, EXIT_USAGE);
}

#[test]
fn solutions_round_trip_through_tree_files() {
    let f = Files::new();
    let p = f.put(
        "mix.sys",
        "sig m\nop */2\nop s/1\nparams a\nsys\nx = *(y,a)\ny = s(*(x,y))\nz = *(z,s(z))\n",
    );
    let out = corec(&["solve", &p]);
    assert_eq!(out.code, EXIT_OK);
    let sys = parse_system(&fs::read_to_string(&p).unwrap()).unwrap();
    for line in out.stdout.lines() {
        let (x, tree) = line.split_once(" = ").unwrap();
        let expected = sys.solve_unique().unwrap().get(x).unwrap().clone();
        let t = parse_tree(sys.sig(), tree).unwrap();
        assert!(t.bisim_eq(&expected).unwrap());
        assert_eq!(t.to_string(), tree, "render . parse is the identity");
        let file = f.put(&format!("{x}.tree"), &corec::text::render_tree_file(&t));
        let back = parse_tree_file(&fs::read_to_string(&file).unwrap()).unwrap();
        assert_eq!(back.to_string(), tree);
        assert_eq!(corec(&["eq", &file, &file]).code, EXIT_OK);
    }
}

#[test]
fn json_solution_trees_rebuild() {
    let f = Files::new();
    let p = f.put("g.sys", "sig u\nop s/1\nop c/0\nsys\nx = y\ny = x\nz = s(x)\nw = s(w)\n");
    let out = corec(&["solve", "--strict", "--format", "json", &p]);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["v"], 1);
    for entry in v["solution"].as_array().unwrap() {
        let doc = serde_json::json!({ "v": 1, "sig": v["sig"], "tree": entry["tree"] });
        let file = f.put("t.json", &doc.to_string());
        let t = parse_tree_file(&fs::read_to_string(&file).unwrap()).unwrap();
        assert_eq!(t.to_string(), entry["text"].as_str().unwrap());
    }
}

#[test]
fn binary_exit_status_and_streams() {
    let f = Files::new();
    let a = f.put("a.tree", "sig u\nop s/1\ntree μt.s(t)\n");
    let b = f.put("b.tree", "sig u\nop s/1\ntree s(μt.s(s(t)))\n");
    let c = f.put("c.tree", "sig u\nop s/1\nparams y\ntree s(y)\n");
    let bin = env!("CARGO_BIN_EXE_corec");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap();
    let out = status(&["eq", &a, &b]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "equal\n");
    assert_eq!(status(&["eq", &a, &c]).status.code(), Some(EXIT_FAIL));
    let out = status(&["eq", &a]);
    assert_eq!(out.status.code(), Some(EXIT_USAGE));
    assert!(!out.stderr.is_empty());
}
