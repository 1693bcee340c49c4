//! Rational trees stored as finite rooted term graphs.
//!
//! A [`RatTree`] denotes the (possibly infinite) Σ-tree obtained by unfolding
//! its graph from the root. Parameter leaves stand for elements of a set `Y`
//! of generators; they are compared by name. Every node of a `RatTree` is
//! reachable from the root, and nodes are numbered breadth-first from the root
//! with children visited left to right.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::sig::{OpId, Signature};

pub type Name = Arc<str>;
pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    Op { op: OpId, children: Vec<NodeId> },
    Param(Name),
}

impl Node {
    pub fn children(&self) -> &[NodeId] {
        match self {
            Node::Op { children, .. } => children,
            Node::Param(_) => &[],
        }
    }
}

#[derive(Debug, Clone)]
pub struct RatTree {
    sig: Arc<Signature>,
    nodes: Vec<Node>,
    root: NodeId,
}

impl PartialEq for RatTree {
    fn eq(&self, other: &Self) -> bool {
        self.root == other.root && self.nodes == other.nodes && self.sig == other.sig
    }
}

impl Eq for RatTree {}

impl Hash for RatTree {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.root.hash(state);
        self.nodes.hash(state);
    }
}

impl PartialOrd for RatTree {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for RatTree {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.nodes.len(), &self.nodes, self.root).cmp(&(other.nodes.len(), &other.nodes, other.root))
    }
}

/// A finite term, used to build acyclic trees.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Op(String, Vec<Term>),
    Leaf(String),
}

impl Term {
    pub fn op(symbol: &str, children: Vec<Term>) -> Term {
        Term::Op(symbol.to_string(), children)
    }

    pub fn leaf(name: &str) -> Term {
        Term::Leaf(name.to_string())
    }

    pub fn height(&self) -> usize {
        match self {
            Term::Leaf(_) => 0,
            Term::Op(_, cs) => cs.iter().map(|c| c.height() + 1).max().unwrap_or(0),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Leaf(_) => 1,
            Term::Op(_, cs) => 1 + cs.iter().map(Term::size).sum::<usize>(),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Leaf(n) => f.write_str(n),
            Term::Op(s, cs) => {
                write!(f, "{s}(")?;
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// A finite prefix of the unfolding of a tree; `Cut` marks truncated nodes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PartialTerm {
    Cut,
    Param(Name),
    Op(String, Vec<PartialTerm>),
}

impl PartialTerm {
    pub fn height(&self) -> usize {
        match self {
            PartialTerm::Cut | PartialTerm::Param(_) => 0,
            PartialTerm::Op(_, cs) => cs.iter().map(|c| c.height() + 1).max().unwrap_or(0),
        }
    }
}

impl fmt::Display for PartialTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PartialTerm::Cut => f.write_str("…"),
            PartialTerm::Param(n) => f.write_str(n),
            PartialTerm::Op(s, cs) => {
                write!(f, "{s}(")?;
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Per-parameter leaf counts of the full unfolding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Occurrences {
    Finite(BTreeMap<Name, u128>),
    Infinite,
}

impl Occurrences {
    pub fn is_finite(&self) -> bool {
        matches!(self, Occurrences::Finite(_))
    }
}

/// Scratch arena for assembling trees out of pieces of other trees.
#[derive(Debug, Clone)]
pub struct GraphBuilder {
    sig: Arc<Signature>,
    nodes: Vec<Node>,
}

impl GraphBuilder {
    pub fn new(sig: Arc<Signature>) -> Self {
        GraphBuilder {
            sig,
            nodes: Vec::new(),
        }
    }

    pub fn sig(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn push(&mut self, node: Node) -> NodeId {
        self.nodes.push(node);
        self.nodes.len() - 1
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn node_mut(&mut self, id: NodeId) -> &mut Node {
        &mut self.nodes[id]
    }

    /// Copies `tree` into the arena and returns the id of its root.
    pub fn import(&mut self, tree: &RatTree) -> Result<NodeId> {
        self.sig = Signature::join(&self.sig, &tree.sig).ok_or(Error::SignatureMismatch)?;
        let offset = self.nodes.len();
        self.nodes.extend(tree.nodes.iter().map(|n| match n {
            Node::Op { op, children } => Node::Op {
                op: *op,
                children: children.iter().map(|c| c + offset).collect(),
            },
            Node::Param(p) => Node::Param(p.clone()),
        }));
        Ok(tree.root + offset)
    }

    /// Redirects every edge through `forward` (one hop).
    pub fn redirect(&mut self, forward: &[NodeId]) {
        for node in &mut self.nodes {
            if let Node::Op { children, .. } = node {
                for c in children.iter_mut() {
                    *c = forward[*c];
                }
            }
        }
    }

    pub fn finish(&self, root: NodeId) -> Result<RatTree> {
        RatTree::from_graph(self.sig.clone(), self.nodes.clone(), root)
    }
}

impl RatTree {
    /// Validates a raw graph and returns the part reachable from `root` in
    /// canonical (breadth-first) order.
    pub fn from_graph(sig: Arc<Signature>, nodes: Vec<Node>, root: NodeId) -> Result<RatTree> {
        if root >= nodes.len() {
            return Err(Error::NodeOutOfRange(root));
        }
        for node in &nodes {
            if let Node::Op { op, children } = node {
                if op.index() >= sig.len() {
                    return Err(Error::UnknownSymbol(format!("#{}", op.0)));
                }
                if children.len() != sig.arity(*op) {
                    return Err(Error::ArityMismatch {
                        symbol: sig.symbol(*op).to_string(),
                        expected: sig.arity(*op),
                        found: children.len(),
                    });
                }
                if let Some(&bad) = children.iter().find(|&&c| c >= nodes.len()) {
                    return Err(Error::NodeOutOfRange(bad));
                }
            }
        }
        Ok(compact(sig, &nodes, root))
    }

    pub fn param(sig: Arc<Signature>, name: &str) -> RatTree {
        RatTree {
            sig,
            nodes: vec![Node::Param(name.into())],
            root: 0,
        }
    }

    /// Acyclic tree of a finite term; leaves must name members of `params`.
    pub fn from_term<S: AsRef<str>>(sig: Arc<Signature>, params: &[S], term: &Term) -> Result<RatTree> {
        fn go<S: AsRef<str>>(sig: &Signature, params: &[S], term: &Term, nodes: &mut Vec<Node>) -> Result<NodeId> {
            match term {
                Term::Leaf(name) => {
                    if !params.iter().any(|p| p.as_ref() == name) {
                        return Err(Error::UnknownParameter(name.clone()));
                    }
                    nodes.push(Node::Param(name.as_str().into()));
                    Ok(nodes.len() - 1)
                }
                Term::Op(symbol, args) => {
                    let op = sig
                        .lookup(symbol)
                        .ok_or_else(|| Error::UnknownSymbol(symbol.clone()))?;
                    if sig.arity(op) != args.len() {
                        return Err(Error::ArityMismatch {
                            symbol: symbol.clone(),
                            expected: sig.arity(op),
                            found: args.len(),
                        });
                    }
                    let id = nodes.len();
                    nodes.push(Node::Op { op, children: vec![] });
                    let children = args
                        .iter()
                        .map(|a| go(sig, params, a, nodes))
                        .collect::<Result<Vec<_>>>()?;
                    nodes[id] = Node::Op { op, children };
                    Ok(id)
                }
            }
        }
        let mut nodes = Vec::new();
        let root = go(&sig, params, term, &mut nodes)?;
        Ok(compact(sig, &nodes, root))
    }

    pub fn sig(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn root_node(&self) -> &Node {
        &self.nodes[self.root]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// The tree rooted at `node`.
    pub fn subtree(&self, node: NodeId) -> RatTree {
        compact(self.sig.clone(), &self.nodes, node)
    }

    /// Reinterprets the tree over a compatible signature (e.g. its strict
    /// extension).
    pub fn retarget(&self, sig: &Arc<Signature>) -> Result<RatTree> {
        match Signature::join(&self.sig, sig) {
            Some(joined) if *joined == **sig => Ok(RatTree {
                sig: sig.clone(),
                nodes: self.nodes.clone(),
                root: self.root,
            }),
            _ => Err(Error::SignatureMismatch),
        }
    }

    /// Names of all parameter leaves.
    pub fn params(&self) -> BTreeSet<Name> {
        self.nodes
            .iter()
            .filter_map(|n| match n {
                Node::Param(p) => Some(p.clone()),
                _ => None,
            })
            .collect()
    }

    pub fn is_closed(&self) -> bool {
        self.nodes.iter().all(|n| matches!(n, Node::Op { .. }))
    }

    pub fn is_acyclic(&self) -> bool {
        !self.cyclic_nodes().into_iter().any(|c| c)
    }

    /// The finite term denoted by an acyclic tree.
    pub fn to_term(&self) -> Option<Term> {
        if !self.is_acyclic() {
            return None;
        }
        fn go(t: &RatTree, n: NodeId) -> Term {
            match &t.nodes[n] {
                Node::Param(p) => Term::Leaf(p.to_string()),
                Node::Op { op, children } => Term::Op(
                    t.sig.symbol(*op).to_string(),
                    children.iter().map(|&c| go(t, c)).collect(),
                ),
            }
        }
        Some(go(self, self.root))
    }

    /// The depth-`depth` prefix of the unfolding; nodes at depth `depth` and
    /// below are replaced by [`PartialTerm::Cut`].
    pub fn unfold(&self, depth: usize) -> PartialTerm {
        self.unfold_at(self.root, depth)
    }

    fn unfold_at(&self, node: NodeId, depth: usize) -> PartialTerm {
        if depth == 0 {
            return PartialTerm::Cut;
        }
        match &self.nodes[node] {
            Node::Param(p) => PartialTerm::Param(p.clone()),
            Node::Op { op, children } => PartialTerm::Op(
                self.sig.symbol(*op).to_string(),
                children.iter().map(|&c| self.unfold_at(c, depth - 1)).collect(),
            ),
        }
    }

    /// Tree equality: the unfoldings agree at every depth.
    ///
    /// Decided by closing the root pair under "same label, pairwise children"
    /// with a union-find over the disjoint union of both node sets.
    pub fn bisim_eq(&self, other: &RatTree) -> Result<bool> {
        if Signature::join(&self.sig, &other.sig).is_none() {
            return Err(Error::SignatureMismatch);
        }
        let offset = self.nodes.len();
        let mut uf = UnionFind::new(offset + other.nodes.len());
        let mut work = vec![(self.root, other.root)];
        while let Some((a, b)) = work.pop() {
            if !uf.union(a, b + offset) {
                continue;
            }
            match (&self.nodes[a], &other.nodes[b]) {
                (Node::Param(p), Node::Param(q)) => {
                    if p != q {
                        return Ok(false);
                    }
                }
                (
                    Node::Op { op: f, children: xs },
                    Node::Op { op: g, children: ys },
                ) => {
                    if f != g {
                        return Ok(false);
                    }
                    work.extend(xs.iter().copied().zip(ys.iter().copied()));
                }
                _ => return Ok(false),
            }
        }
        Ok(true)
    }

    /// Node classes of the coarsest bisimulation, by iterated refinement.
    fn bisim_classes(&self) -> (Vec<usize>, usize) {
        let mut labels: HashMap<Label<'_>, usize> = HashMap::new();
        let mut class: Vec<usize> = self
            .nodes
            .iter()
            .map(|n| {
                let key = match n {
                    Node::Op { op, .. } => Label::Op(*op),
                    Node::Param(p) => Label::Param(p),
                };
                let next = labels.len();
                *labels.entry(key).or_insert(next)
            })
            .collect();
        let mut count = labels.len();
        loop {
            let mut keys: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
            let refined: Vec<usize> = self
                .nodes
                .iter()
                .enumerate()
                .map(|(i, n)| {
                    let key = (class[i], n.children().iter().map(|&c| class[c]).collect());
                    let next = keys.len();
                    *keys.entry(key).or_insert(next)
                })
                .collect();
            let refined_count = keys.len();
            class = refined;
            if refined_count == count {
                return (class, count);
            }
            count = refined_count;
        }
    }

    /// The bisimilar tree with the fewest nodes, in canonical numbering.
    pub fn minimize(&self) -> RatTree {
        let (class, count) = self.bisim_classes();
        let mut quotient: Vec<Option<Node>> = vec![None; count];
        for (i, n) in self.nodes.iter().enumerate() {
            if quotient[class[i]].is_none() {
                quotient[class[i]] = Some(match n {
                    Node::Op { op, children } => Node::Op {
                        op: *op,
                        children: children.iter().map(|&c| class[c]).collect(),
                    },
                    Node::Param(p) => Node::Param(p.clone()),
                });
            }
        }
        let nodes: Vec<Node> = quotient.into_iter().map(|n| n.expect("class has a node")).collect();
        compact(self.sig.clone(), &nodes, class[self.root])
    }

    /// Number of distinct subtrees (the node count of the minimal graph).
    pub fn count_subtrees(&self) -> usize {
        self.bisim_classes().1
    }

    /// Marks the nodes that lie on a directed cycle (Tarjan's SCC algorithm).
    pub fn cyclic_nodes(&self) -> Vec<bool> {
        let n = self.nodes.len();
        let mut index = vec![usize::MAX; n];
        let mut low = vec![0; n];
        let mut on_stack = vec![false; n];
        let mut stack = Vec::new();
        let mut cyclic = vec![false; n];
        let mut counter = 0;
        for start in 0..n {
            if index[start] != usize::MAX {
                continue;
            }
            let mut call: Vec<(NodeId, usize)> = vec![(start, 0)];
            index[start] = counter;
            low[start] = counter;
            counter += 1;
            stack.push(start);
            on_stack[start] = true;
            while let Some(top) = call.len().checked_sub(1) {
                let (v, next) = call[top];
                let children = self.nodes[v].children();
                if next < children.len() {
                    let w = children[next];
                    call[top].1 += 1;
                    if w == v {
                        cyclic[v] = true;
                    }
                    if index[w] == usize::MAX {
                        index[w] = counter;
                        low[w] = counter;
                        counter += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        call.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                } else {
                    call.pop();
                    if let Some(&(parent, _)) = call.last() {
                        low[parent] = low[parent].min(low[v]);
                    }
                    if low[v] == index[v] {
                        let mut component = Vec::new();
                        loop {
                            let w = stack.pop().expect("scc stack");
                            on_stack[w] = false;
                            component.push(w);
                            if w == v {
                                break;
                            }
                        }
                        if component.len() > 1 {
                            for w in component {
                                cyclic[w] = true;
                            }
                        }
                    }
                }
            }
        }
        cyclic
    }

    /// Nodes from which some parameter leaf is reachable.
    fn reaches_param(&self) -> Vec<bool> {
        let mut parents: Vec<Vec<NodeId>> = vec![Vec::new(); self.nodes.len()];
        for (i, n) in self.nodes.iter().enumerate() {
            for &c in n.children() {
                parents[c].push(i);
            }
        }
        let mut reach = vec![false; self.nodes.len()];
        let mut work: Vec<NodeId> = self
            .nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| matches!(n, Node::Param(_)))
            .map(|(i, _)| i)
            .collect();
        for &w in &work {
            reach[w] = true;
        }
        while let Some(v) = work.pop() {
            for &p in &parents[v] {
                if !reach[p] {
                    reach[p] = true;
                    work.push(p);
                }
            }
        }
        reach
    }

    /// Topological order of the parameter-reaching part, or `None` when a
    /// parameter is reachable from a cycle.
    fn param_dag(&self) -> Option<Vec<NodeId>> {
        let reach = self.reaches_param();
        let cyclic = self.cyclic_nodes();
        if (0..self.nodes.len()).any(|i| reach[i] && cyclic[i]) {
            return None;
        }
        let mut indegree = vec![0usize; self.nodes.len()];
        for (i, n) in self.nodes.iter().enumerate() {
            if reach[i] {
                for &c in n.children() {
                    if reach[c] {
                        indegree[c] += 1;
                    }
                }
            }
        }
        let mut order = Vec::new();
        let mut queue: VecDeque<NodeId> = (0..self.nodes.len())
            .filter(|&i| reach[i] && indegree[i] == 0)
            .collect();
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &c in self.nodes[v].children() {
                if reach[c] {
                    indegree[c] -= 1;
                    if indegree[c] == 0 {
                        queue.push_back(c);
                    }
                }
            }
        }
        Some(order)
    }

    /// Leaf counts per parameter in the full unfolding. Counts saturate at
    /// `u128::MAX`.
    pub fn param_occurrences(&self) -> Occurrences {
        let Some(order) = self.param_dag() else {
            return Occurrences::Infinite;
        };
        let mut paths = vec![0u128; self.nodes.len()];
        paths[self.root] = 1;
        let mut counts = BTreeMap::new();
        for v in order {
            match &self.nodes[v] {
                Node::Param(p) => {
                    let e = counts.entry(p.clone()).or_insert(0u128);
                    *e = e.saturating_add(paths[v]);
                }
                Node::Op { children, .. } => {
                    for &c in children {
                        paths[c] = paths[c].saturating_add(paths[v]);
                    }
                }
            }
        }
        counts.retain(|_, c| *c > 0);
        Occurrences::Finite(counts)
    }

    /// Greatest depth of a parameter leaf in the unfolding: `Ok(None)` for a
    /// closed tree, `Err(())` when parameters occur infinitely often.
    #[allow(clippy::result_unit_err)]
    pub fn max_param_depth(&self) -> std::result::Result<Option<usize>, ()> {
        let order = self.param_dag().ok_or(())?;
        let mut depth: Vec<Option<usize>> = vec![None; self.nodes.len()];
        depth[self.root] = Some(0);
        let mut deepest = None;
        for v in order {
            let Some(d) = depth[v] else { continue };
            match &self.nodes[v] {
                Node::Param(_) => deepest = deepest.max(Some(d)),
                Node::Op { children, .. } => {
                    for &c in children {
                        depth[c] = depth[c].max(Some(d + 1));
                    }
                }
            }
        }
        Ok(deepest)
    }

    /// Membership in `M*Y`: finitely many parameter leaves.
    pub fn is_in_mstar(&self) -> bool {
        self.param_occurrences().is_finite()
    }

    /// Membership in the `n`-th stage `U_n` of the free-corecursive-algebra
    /// chain: every parameter leaf sits at depth `< n`.
    pub fn is_in_un(&self, n: usize) -> bool {
        match self.max_param_depth() {
            Err(()) => false,
            Ok(None) => true,
            Ok(Some(d)) => d < n,
        }
    }
}

#[derive(PartialEq, Eq, Hash)]
enum Label<'a> {
    Op(OpId),
    Param(&'a Name),
}

/// Restriction of a graph to the nodes reachable from `root`, renumbered
/// breadth-first with children left to right.
fn compact(sig: Arc<Signature>, nodes: &[Node], root: NodeId) -> RatTree {
    let mut map = vec![usize::MAX; nodes.len()];
    let mut order = Vec::new();
    let mut queue = VecDeque::from([root]);
    map[root] = 0;
    order.push(root);
    while let Some(v) = queue.pop_front() {
        for &c in nodes[v].children() {
            if map[c] == usize::MAX {
                map[c] = order.len();
                order.push(c);
                queue.push_back(c);
            }
        }
    }
    let nodes = order
        .iter()
        .map(|&v| match &nodes[v] {
            Node::Op { op, children } => Node::Op {
                op: *op,
                children: children.iter().map(|&c| map[c]).collect(),
            },
            Node::Param(p) => Node::Param(p.clone()),
        })
        .collect();
    RatTree { sig, nodes, root: 0 }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when already merged.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

/// Every distinct tree (up to bisimilarity, as minimized graphs) that some
/// graph with at most `max_nodes` nodes over `sig` and `params` represents.
pub fn enumerate_graphs<S: AsRef<str>>(sig: &Arc<Signature>, params: &[S], max_nodes: usize) -> Vec<RatTree> {
    let mut seen: HashSet<RatTree> = HashSet::new();
    for m in 1..=max_nodes {
        let mut labels: Vec<Node> = Vec::new();
        for op in sig.op_ids() {
            let ar = sig.arity(op);
            let total = m.pow(ar as u32);
            for code in 0..total {
                let mut children = vec![0; ar];
                let mut rest = code;
                for slot in children.iter_mut().rev() {
                    *slot = rest % m;
                    rest /= m;
                }
                labels.push(Node::Op { op, children });
            }
        }
        labels.extend(params.iter().map(|p| Node::Param(p.as_ref().into())));
        if labels.is_empty() {
            break;
        }
        let mut choice = vec![0usize; m];
        loop {
            let nodes: Vec<Node> = choice.iter().map(|&c| labels[c].clone()).collect();
            seen.insert(compact(sig.clone(), &nodes, 0).minimize());
            let mut i = 0;
            while i < m {
                choice[i] += 1;
                if choice[i] < labels.len() {
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
            if i == m {
                break;
            }
        }
    }
    let mut out: Vec<RatTree> = seen.into_iter().collect();
    out.sort();
    out
}
