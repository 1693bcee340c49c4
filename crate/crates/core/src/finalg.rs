//! Finite algebras, their flat equation systems, and brute-force checks of
//! corecursiveness and existence of solutions.
//!
//! Tables are stored in mixed radix: the arguments `(a_1, …, a_n)` of an
//! `n`-ary symbol sit at index `a_1·|A|^{n-1} + … + a_n`.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use itertools::Itertools;
use rand::Rng;

use crate::error::{Error, Result};
use crate::sig::{OpId, Signature};
use crate::solve::{EqSystem, Rhs};
use crate::tree::{Name, Node, RatTree};

pub fn decode_args(code: usize, n: usize, arity: usize) -> Vec<usize> {
    let mut args = vec![0; arity];
    let mut rest = code;
    for slot in args.iter_mut().rev() {
        *slot = rest % n;
        rest /= n;
    }
    args
}

pub fn encode_args(args: &[usize], n: usize) -> usize {
    args.iter().fold(0, |acc, &a| acc * n + a)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteAlgebra {
    sig: Arc<Signature>,
    carrier: Vec<String>,
    tables: Vec<Vec<usize>>,
}

impl FiniteAlgebra {
    pub fn new(sig: Arc<Signature>, carrier: Vec<String>, tables: Vec<Vec<usize>>) -> Result<Self> {
        let n = carrier.len();
        if carrier.iter().collect::<BTreeSet<_>>().len() != n {
            return Err(Error::InvalidAlgebra("duplicate carrier element".into()));
        }
        if tables.len() != sig.len() {
            return Err(Error::InvalidAlgebra(format!(
                "{} tables for {} symbols",
                tables.len(),
                sig.len()
            )));
        }
        for (op, table) in sig.op_ids().zip(&tables) {
            let expected = n.pow(sig.arity(op) as u32);
            if table.len() != expected {
                return Err(Error::InvalidAlgebra(format!(
                    "table `{}` has {} entries, expected {expected}",
                    sig.symbol(op),
                    table.len()
                )));
            }
            if table.iter().any(|&v| v >= n) {
                return Err(Error::InvalidAlgebra(format!("table `{}` leaves the carrier", sig.symbol(op))));
            }
        }
        Ok(FiniteAlgebra { sig, carrier, tables })
    }

    /// Carrier `0, 1, …, n-1` named by numerals.
    pub fn from_tables(sig: Arc<Signature>, n: usize, tables: Vec<Vec<usize>>) -> Result<Self> {
        Self::new(sig, (0..n).map(|i| i.to_string()).collect(), tables)
    }

    /// `s/1` acting as `map`.
    pub fn unary(map: &[usize]) -> Self {
        let sig = Signature::new(&[("s", 1)]).expect("valid");
        Self::from_tables(sig, map.len(), vec![map.to_vec()]).expect("unary table")
    }

    /// `*/2` with `table[a·n + b] = a*b`.
    pub fn binary(n: usize, table: &[usize]) -> Self {
        let sig = Signature::new(&[("*", 2)]).expect("valid");
        Self::from_tables(sig, n, vec![table.to_vec()]).expect("binary table")
    }

    pub fn random<R: Rng>(sig: Arc<Signature>, n: usize, rng: &mut R) -> Self {
        let tables = sig
            .op_ids()
            .map(|op| {
                (0..n.pow(sig.arity(op) as u32))
                    .map(|_| rng.gen_range(0..n))
                    .collect()
            })
            .collect();
        Self::from_tables(sig, n, tables).expect("random tables are total")
    }

    pub fn sig(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn carrier(&self) -> &[String] {
        &self.carrier
    }

    pub fn size(&self) -> usize {
        self.carrier.len()
    }

    pub fn table(&self, op: OpId) -> &[usize] {
        &self.tables[op.index()]
    }

    pub fn apply(&self, op: OpId, args: &[usize]) -> usize {
        self.tables[op.index()][encode_args(args, self.size())]
    }

    pub fn table_entries(&self, op: OpId) -> impl Iterator<Item = (Vec<usize>, usize)> + '_ {
        let (n, ar) = (self.size(), self.sig.arity(op));
        self.tables[op.index()]
            .iter()
            .enumerate()
            .map(move |(code, &v)| (decode_args(code, n, ar), v))
    }

    /// Total number of table entries.
    pub fn table_size(&self) -> usize {
        self.tables.iter().map(Vec::len).sum()
    }

    fn only_op(&self, arity: usize) -> Result<OpId> {
        match self.sig.ops() {
            [d] if d.arity == arity => Ok(OpId(0)),
            _ => Err(Error::SignatureShape(format!("expected a single symbol of arity {arity}"))),
        }
    }
}

fn unique_names(names: Vec<String>) -> Vec<String> {
    if names.iter().collect::<BTreeSet<_>>().len() == names.len() {
        names
    } else {
        (0..names.len()).map(|i| format!("e{i}")).collect()
    }
}

/// Elements `a` with `a*a = a`.
pub fn idempotents(alg: &FiniteAlgebra) -> Result<BTreeSet<usize>> {
    let op = alg.only_op(2)?;
    Ok((0..alg.size()).filter(|&a| alg.apply(op, &[a, a]) == a).collect())
}

/// Elements `a` with `s(a) = a`.
pub fn fixpoints(alg: &FiniteAlgebra) -> Result<BTreeSet<usize>> {
    let op = alg.only_op(1)?;
    Ok((0..alg.size()).filter(|&a| alg.apply(op, &[a]) == a).collect())
}

/// Elements lying on a cycle of `s`.
pub fn periodic_points(alg: &FiniteAlgebra) -> Result<BTreeSet<usize>> {
    let op = alg.only_op(1)?;
    let n = alg.size();
    Ok((0..n)
        .filter(|&a| {
            let mut x = alg.apply(op, &[a]);
            for _ in 0..n {
                if x == a {
                    return true;
                }
                x = alg.apply(op, &[x]);
            }
            false
        })
        .collect())
}

/// The largest `S ⊆ A` with every member of `S` a product of two members.
pub fn completely_factorizable(alg: &FiniteAlgebra) -> Result<BTreeSet<usize>> {
    let op = alg.only_op(2)?;
    let mut s: BTreeSet<usize> = (0..alg.size()).collect();
    loop {
        let products: BTreeSet<usize> = s
            .iter()
            .cartesian_product(s.iter())
            .map(|(&b, &c)| alg.apply(op, &[b, c]))
            .collect();
        let next: BTreeSet<usize> = s.intersection(&products).copied().collect();
        if next == s {
            return Ok(s);
        }
        s = next;
    }
}

pub fn product(a: &FiniteAlgebra, b: &FiniteAlgebra) -> Result<FiniteAlgebra> {
    if a.sig != b.sig {
        return Err(Error::SignatureMismatch);
    }
    let (na, nb) = (a.size(), b.size());
    let carrier = unique_names(
        a.carrier
            .iter()
            .cartesian_product(&b.carrier)
            .map(|(x, y)| format!("{x}:{y}"))
            .collect(),
    );
    let n = na * nb;
    let tables = a
        .sig
        .op_ids()
        .map(|op| {
            let ar = a.sig.arity(op);
            (0..n.pow(ar as u32))
                .map(|code| {
                    let args = decode_args(code, n, ar);
                    let left: Vec<usize> = args.iter().map(|p| p / nb).collect();
                    let right: Vec<usize> = args.iter().map(|p| p % nb).collect();
                    a.apply(op, &left) * nb + b.apply(op, &right)
                })
                .collect()
        })
        .collect();
    FiniteAlgebra::new(a.sig.clone(), carrier, tables)
}

/// Projections of `product(a, b)` onto `a` and `b`.
pub fn projections(a: &FiniteAlgebra, b: &FiniteAlgebra) -> Result<(AlgHom, AlgHom)> {
    let p = product(a, b)?;
    let nb = b.size();
    let left = (0..p.size()).map(|x| x / nb).collect();
    let right = (0..p.size()).map(|x| x % nb).collect();
    Ok((AlgHom::new(p.clone(), a.clone(), left)?, AlgHom::new(p, b.clone(), right)?))
}

/// The algebra `inl·H[a,f]` on `HA + B`. Elements of `HA` come first, symbol by
/// symbol, each block in mixed-radix order; the `B` block follows.
pub fn generalized(alg: &FiniteAlgebra, b: &[String], f: &[usize]) -> Result<FiniteAlgebra> {
    if f.len() != b.len() || f.iter().any(|&x| x >= alg.size()) {
        return Err(Error::InvalidAlgebra("f must map B into the carrier".into()));
    }
    let sig = &alg.sig;
    let n = alg.size();
    let mut offsets = Vec::with_capacity(sig.len());
    let mut names = Vec::new();
    for op in sig.op_ids() {
        offsets.push(names.len());
        let ar = sig.arity(op);
        for code in 0..n.pow(ar as u32) {
            let args: Vec<&str> = decode_args(code, n, ar).iter().map(|&x| alg.carrier[x].as_str()).collect();
            names.push(format!("{}:{}", sig.symbol(op), args.join(":")));
        }
    }
    let ha = names.len();
    names.extend(b.iter().map(|x| format!("inr:{x}")));
    let m = names.len();
    // [a, f]: HA + B → A
    let collapse: Vec<usize> = (0..m)
        .map(|c| {
            if c >= ha {
                return f[c - ha];
            }
            let op = OpId((offsets.iter().rposition(|&o| o <= c).expect("block")) as u32);
            alg.tables[op.index()][c - offsets[op.index()]]
        })
        .collect();
    let tables = sig
        .op_ids()
        .map(|op| {
            let ar = sig.arity(op);
            (0..m.pow(ar as u32))
                .map(|code| {
                    let args: Vec<usize> = decode_args(code, m, ar).iter().map(|&c| collapse[c]).collect();
                    offsets[op.index()] + encode_args(&args, n)
                })
                .collect()
        })
        .collect();
    FiniteAlgebra::new(sig.clone(), unique_names(names), tables)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgHom {
    source: FiniteAlgebra,
    target: FiniteAlgebra,
    map: Vec<usize>,
}

impl AlgHom {
    pub fn new(source: FiniteAlgebra, target: FiniteAlgebra, map: Vec<usize>) -> Result<Self> {
        if source.sig != target.sig {
            return Err(Error::SignatureMismatch);
        }
        if map.len() != source.size() || map.iter().any(|&x| x >= target.size()) {
            return Err(Error::InvalidAlgebra("map is not total".into()));
        }
        let h = AlgHom { source, target, map };
        if !h.commutes() {
            return Err(Error::NotHomomorphism);
        }
        Ok(h)
    }

    pub fn identity(alg: &FiniteAlgebra) -> Self {
        AlgHom {
            source: alg.clone(),
            target: alg.clone(),
            map: (0..alg.size()).collect(),
        }
    }

    fn commutes(&self) -> bool {
        self.source.sig.op_ids().all(|op| {
            self.source.table_entries(op).all(|(args, v)| {
                let image: Vec<usize> = args.iter().map(|&a| self.map[a]).collect();
                self.target.apply(op, &image) == self.map[v]
            })
        })
    }

    pub fn source(&self) -> &FiniteAlgebra {
        &self.source
    }

    pub fn target(&self) -> &FiniteAlgebra {
        &self.target
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }
}

/// Every homomorphism `a → b`, by trying all maps.
pub fn homomorphisms(a: &FiniteAlgebra, b: &FiniteAlgebra) -> Vec<AlgHom> {
    if a.sig != b.sig {
        return Vec::new();
    }
    let (na, nb) = (a.size(), b.size());
    if nb == 0 {
        return if na == 0 { vec![AlgHom::identity(a)] } else { Vec::new() };
    }
    (0..nb.pow(na as u32))
        .filter_map(|code| AlgHom::new(a.clone(), b.clone(), decode_args(code, nb, na)).ok())
        .collect()
}

/// A flat system `x_i = σ_i(x_{j_1}, …, x_{j_n})` on variables `0..len`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FlatSystem {
    eqs: Vec<(OpId, Vec<usize>)>,
}

impl FlatSystem {
    pub fn new(eqs: Vec<(OpId, Vec<usize>)>) -> Self {
        FlatSystem { eqs }
    }

    pub fn equations(&self) -> &[(OpId, Vec<usize>)] {
        &self.eqs
    }

    pub fn len(&self) -> usize {
        self.eqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eqs.is_empty()
    }

    pub fn from_system(sys: &EqSystem) -> Result<Self> {
        let eqs = sys
            .equations()
            .map(|(x, r)| flat_equation(sys, r).ok_or_else(|| Error::NotFlat(x.to_string())))
            .collect::<Result<_>>()?;
        Ok(FlatSystem { eqs })
    }

    /// One equation per node of a closed tree; variable `i` is node `i`.
    pub fn from_tree(t: &RatTree) -> Result<Self> {
        let eqs = t
            .nodes()
            .iter()
            .map(|n| match n {
                Node::Op { op, children } => Ok((*op, children.clone())),
                Node::Param(p) => Err(Error::DanglingLeaf(p.to_string())),
            })
            .collect::<Result<_>>()?;
        Ok(FlatSystem { eqs })
    }

    /// The same system as an [`EqSystem`] on variables `x0, x1, …`.
    pub fn to_system(&self, sig: &Arc<Signature>) -> Result<EqSystem> {
        let vars: Vec<Name> = (0..self.len()).map(|i| Name::from(format!("x{i}"))).collect();
        let rhs = self
            .eqs
            .iter()
            .map(|(op, children)| {
                let mut nodes = vec![Node::Op {
                    op: *op,
                    children: (1..=children.len()).collect(),
                }];
                nodes.extend(children.iter().map(|&c| Node::Param(vars[c].clone())));
                RatTree::from_graph(sig.clone(), nodes, 0).map(Rhs::Tree)
            })
            .collect::<Result<_>>()?;
        EqSystem::new(sig.clone(), vars, vec![], rhs)
    }

    fn check_ops(&self, alg: &FiniteAlgebra) -> Result<()> {
        if self.eqs.iter().any(|(op, c)| op.index() >= alg.sig.len() || alg.sig.arity(*op) != c.len()) {
            return Err(Error::SignatureMismatch);
        }
        Ok(())
    }

    fn holds(&self, alg: &FiniteAlgebra, s: &[usize]) -> bool {
        let mut args = Vec::new();
        self.eqs.iter().enumerate().all(|(x, (op, children))| {
            args.clear();
            args.extend(children.iter().map(|&c| s[c]));
            alg.apply(*op, &args) == s[x]
        })
    }

    /// Every solution, by trying all `|A|^|X|` assignments.
    pub fn solutions_in(&self, alg: &FiniteAlgebra) -> Result<Vec<Vec<usize>>> {
        self.check_ops(alg)?;
        let (n, m) = (alg.size(), self.len());
        if n == 0 {
            return Ok(if m == 0 { vec![vec![]] } else { vec![] });
        }
        Ok((0..n.pow(m as u32))
            .map(|code| decode_args(code, n, m))
            .filter(|s| self.holds(alg, s))
            .collect())
    }

    /// Up to `cap` solutions, found by propagation and backtracking.
    pub fn search(&self, alg: &FiniteAlgebra, cap: usize) -> Result<Vec<Vec<usize>>> {
        self.check_ops(alg)?;
        let mut found = Vec::new();
        if cap > 0 {
            self.backtrack(alg, vec![None; self.len()], cap, &mut found);
        }
        Ok(found)
    }

    /// The number of solutions, capped at `cap`.
    pub fn count_solutions(&self, alg: &FiniteAlgebra, cap: usize) -> Result<usize> {
        Ok(self.search(alg, cap)?.len())
    }

    fn backtrack(&self, alg: &FiniteAlgebra, mut vals: Vec<Option<usize>>, cap: usize, found: &mut Vec<Vec<usize>>) {
        let mut args = Vec::new();
        loop {
            let mut changed = false;
            for (x, (op, children)) in self.eqs.iter().enumerate() {
                args.clear();
                for &c in children {
                    match vals[c] {
                        Some(v) => args.push(v),
                        None => break,
                    }
                }
                if args.len() < children.len() {
                    continue;
                }
                let v = alg.apply(*op, &args);
                match vals[x] {
                    None => {
                        vals[x] = Some(v);
                        changed = true;
                    }
                    Some(w) if w != v => return,
                    Some(_) => {}
                }
            }
            if !changed {
                break;
            }
        }
        let Some(free) = vals.iter().position(Option::is_none) else {
            found.push(vals.into_iter().map(|v| v.expect("assigned")).collect());
            return;
        };
        for a in 0..alg.size() {
            let mut next = vals.clone();
            next[free] = Some(a);
            self.backtrack(alg, next, cap, found);
            if found.len() >= cap {
                return;
            }
        }
    }
}

fn flat_equation(sys: &EqSystem, r: &Rhs) -> Option<(OpId, Vec<usize>)> {
    let Rhs::Tree(t) = r else { return None };
    let Node::Op { op, children } = t.root_node() else { return None };
    let vars = children
        .iter()
        .map(|&c| match t.node(c) {
            Node::Param(p) if c != t.root() => sys.var_index(p),
            _ => None,
        })
        .collect::<Option<Vec<_>>>()?;
    Some((*op, vars))
}

/// The solutions of a flat system in `alg`, each a value per variable, by
/// exhaustive search over all assignments.
pub fn solutions_of(sys: &EqSystem, alg: &FiniteAlgebra) -> Result<Vec<Vec<usize>>> {
    if Signature::join(sys.sig(), alg.sig()).as_ref() != Some(alg.sig()) {
        return Err(Error::SignatureMismatch);
    }
    FlatSystem::from_system(sys)?.solutions_in(alg)
}

type CatalogKey = (Vec<usize>, usize);

fn catalog_cache() -> &'static Mutex<HashMap<CatalogKey, Arc<Vec<FlatSystem>>>> {
    static CACHE: OnceLock<Mutex<HashMap<CatalogKey, Arc<Vec<FlatSystem>>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// All flat systems on exactly `m` variables over symbols of the given
/// arities, one per class under renaming of variables.
pub fn flat_systems(arities: &[usize], m: usize) -> Arc<Vec<FlatSystem>> {
    let key = (arities.to_vec(), m);
    if let Some(hit) = catalog_cache().lock().expect("cache lock").get(&key) {
        return hit.clone();
    }
    let systems = Arc::new(build_catalog(arities, m));
    catalog_cache().lock().expect("cache lock").insert(key, systems.clone());
    systems
}

fn build_catalog(arities: &[usize], m: usize) -> Vec<FlatSystem> {
    // label = (op, children) encoded as offset[op] + mixed-radix children
    let mut offsets = Vec::with_capacity(arities.len());
    let mut labels = 0usize;
    for &ar in arities {
        offsets.push(labels);
        labels += m.pow(ar as u32);
    }
    if m == 0 {
        return vec![FlatSystem::new(vec![])];
    }
    if labels == 0 {
        return vec![];
    }
    let decode_label = |l: usize| -> (usize, Vec<usize>) {
        let op = offsets.iter().rposition(|&o| o <= l).expect("label block");
        (op, decode_args(l - offsets[op], m, arities[op]))
    };
    let label_table: Vec<(usize, Vec<usize>)> = (0..labels).map(decode_label).collect();
    let total = labels.pow(m as u32);
    let perms: Vec<Vec<usize>> = (0..m).permutations(m).collect();
    let mut seen = vec![false; total];
    let mut out = Vec::new();
    for code in 0..total {
        if seen[code] {
            continue;
        }
        let sys = decode_args(code, labels, m);
        out.push(FlatSystem::new(
            sys.iter()
                .map(|&l| {
                    let (op, children) = &label_table[l];
                    (OpId(*op as u32), children.clone())
                })
                .collect(),
        ));
        for p in &perms {
            let mut image = vec![0; m];
            for (x, &l) in sys.iter().enumerate() {
                let (op, children) = &label_table[l];
                let moved: Vec<usize> = children.iter().map(|&c| p[c]).collect();
                image[p[x]] = offsets[*op] + encode_args(&moved, m);
            }
            seen[encode_args(&image, labels)] = true;
        }
    }
    out
}

fn arities(sig: &Signature) -> Vec<usize> {
    sig.ops().iter().map(|d| d.arity).collect()
}

/// The first flat system on at most `k` variables whose number of solutions
/// (capped at 2) fails `ok`.
pub fn find_system(alg: &FiniteAlgebra, k: usize, ok: impl Fn(usize) -> bool) -> Option<FlatSystem> {
    let ar = arities(&alg.sig);
    (1..=k).find_map(|m| {
        flat_systems(&ar, m)
            .iter()
            .find(|sys| !ok(sys.count_solutions(alg, 2).expect("catalog matches signature")))
            .cloned()
    })
}

/// Every flat system on at most `k` variables has exactly one solution.
pub fn bounded_corecursive(alg: &FiniteAlgebra, k: usize) -> bool {
    find_system(alg, k, |c| c == 1).is_none()
}

/// Every flat system on at most `k` variables has a solution.
pub fn bloom_witness(alg: &FiniteAlgebra, k: usize) -> bool {
    find_system(alg, k, |c| c >= 1).is_none()
}

/// Whether `h` carries the unique solution of `sys` in its source to the
/// unique solution in its target.
pub fn hom_preserves(h: &AlgHom, sys: &EqSystem) -> Result<bool> {
    let src = solutions_of(sys, &h.source)?;
    let tgt = solutions_of(sys, &h.target)?;
    if src.len() != 1 {
        return Err(Error::NonUniqueSolutions("source"));
    }
    if tgt.len() != 1 {
        return Err(Error::NonUniqueSolutions("target"));
    }
    let mapped: Vec<usize> = src[0].iter().map(|&a| h.map[a]).collect();
    Ok(mapped == tgt[0])
}

/// The values a closed rational tree can take in `alg`: the root components
/// of all solutions of its node system.
pub fn eval_tree(alg: &FiniteAlgebra, t: &RatTree) -> Result<BTreeSet<usize>> {
    if Signature::join(t.sig(), alg.sig()).as_ref() != Some(alg.sig()) {
        return Err(Error::SignatureMismatch);
    }
    let flat = FlatSystem::from_tree(t)?;
    Ok(flat
        .search(alg, usize::MAX)?
        .into_iter()
        .map(|s| s[t.root()])
        .collect())
}
