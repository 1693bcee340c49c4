//! Line-oriented text formats and μ-notation.
//!
//! ```text
//! # comment
//! sig NAME
//! op */2
//! op c/0
//! params a b          # optional
//! sys                 # system files
//! x = *(a, x)
//! carrier e0 e1       # algebra files
//! table *: e0,e0->e0 e0,e1->e1 ...
//! tree μt0.*(t0,a)    # tree files
//! ```
//!
//! A bare identifier in an expression names a μ-binder, a variable, a
//! parameter or a nullary symbol, looked up in that order. Nullary symbols are
//! rendered as `c()`.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finalg::FiniteAlgebra;
use crate::sig::{Signature, BOTTOM};
use crate::solve::{EqSystem, Rhs, Solution};
use crate::tree::{Name, Node, NodeId, RatTree};

fn is_name_char(c: char) -> bool {
    c != 'μ' && (c.is_alphanumeric() || "_'*+-<>!?&|^~@$%:".contains(c))
}

// ---------------------------------------------------------------------------
// rendering

impl fmt::Display for RatTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_tree(self))
    }
}

/// μ-notation; binders `t0, t1, …` are numbered in canonical node order and
/// introduced only at targets of back edges.
pub fn render_tree(t: &RatTree) -> String {
    fn collect(t: &RatTree, v: NodeId, stack: &mut Vec<NodeId>, binders: &mut BTreeSet<NodeId>) {
        stack.push(v);
        for &c in t.node(v).children() {
            if stack.contains(&c) {
                binders.insert(c);
            } else {
                collect(t, c, stack, binders);
            }
        }
        stack.pop();
    }
    let mut binders = BTreeSet::new();
    collect(t, t.root(), &mut Vec::new(), &mut binders);

    let taken = t.params();
    let mut names: HashMap<NodeId, String> = HashMap::new();
    let mut k = 0;
    for &b in &binders {
        let name = loop {
            let candidate = format!("t{k}");
            k += 1;
            if !taken.contains(candidate.as_str()) {
                break candidate;
            }
        };
        names.insert(b, name);
    }

    fn go(t: &RatTree, v: NodeId, stack: &mut Vec<(NodeId, bool)>, names: &HashMap<NodeId, String>, out: &mut String) {
        match t.node(v) {
            Node::Param(p) => out.push_str(p),
            Node::Op { op, children } => {
                stack.push((v, false));
                let mut body = String::new();
                body.push_str(t.sig().symbol(*op));
                body.push('(');
                for (i, &c) in children.iter().enumerate() {
                    if i > 0 {
                        body.push(',');
                    }
                    if let Some(entry) = stack.iter_mut().find(|(n, _)| *n == c) {
                        entry.1 = true;
                        body.push_str(&names[&c]);
                    } else {
                        go(t, c, stack, names, &mut body);
                    }
                }
                body.push(')');
                let (_, used) = stack.pop().expect("pushed above");
                if used {
                    out.push('μ');
                    out.push_str(&names[&v]);
                    out.push('.');
                }
                out.push_str(&body);
            }
        }
    }
    let mut out = String::new();
    go(t, t.root(), &mut Vec::new(), &names, &mut out);
    out
}

/// A right-hand side as it appears after `x = ` in a system file.
pub fn render_rhs(r: &Rhs) -> String {
    match r {
        Rhs::Var(y) => y.to_string(),
        Rhs::Tree(t) => render_tree(t),
    }
}

fn write_sig_block(out: &mut String, sig: &Signature) {
    out.push_str(&sig.to_string());
}

impl fmt::Display for EqSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        write_sig_block(&mut out, self.sig());
        if !self.params().is_empty() {
            out.push_str("params");
            for p in self.params() {
                out.push(' ');
                out.push_str(p);
            }
            out.push('\n');
        }
        out.push_str("sys\n");
        for (x, r) in self.equations() {
            out.push_str(&format!("{x} = {}\n", render_rhs(r)));
        }
        f.write_str(&out)
    }
}

impl fmt::Display for Solution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (x, t) in self.iter() {
            writeln!(f, "{x} = {t}")?;
        }
        Ok(())
    }
}

impl fmt::Display for FiniteAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        write_sig_block(&mut out, self.sig());
        out.push_str("carrier");
        for e in self.carrier() {
            out.push(' ');
            out.push_str(e);
        }
        out.push('\n');
        for op in self.sig().op_ids() {
            out.push_str(&format!("table {}:", self.sig().symbol(op)));
            for (args, value) in self.table_entries(op) {
                let args: Vec<&str> = args.iter().map(|&a| self.carrier()[a].as_str()).collect();
                out.push_str(&format!(" {}->{}", args.join(","), self.carrier()[value]));
            }
            out.push('\n');
        }
        f.write_str(&out)
    }
}

// ---------------------------------------------------------------------------
// expressions

/// How bare identifiers that are neither binders, variables, parameters nor
/// nullary symbols are treated.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Unknown {
    Reject,
    Param,
}

struct ExprParser<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    sig: Arc<Signature>,
    known: &'a HashSet<Name>,
    unknown: Unknown,
    nodes: Vec<Node>,
    /// placeholder node → body root, for μ-binders
    alias: HashMap<NodeId, NodeId>,
    binders: Vec<(String, NodeId)>,
    used_bottom: bool,
}

impl<'a> ExprParser<'a> {
    fn new(text: &str, line: usize, sig: &Arc<Signature>, known: &'a HashSet<Name>, unknown: Unknown) -> Self {
        ExprParser {
            chars: text.chars().collect(),
            pos: 0,
            line,
            sig: sig.strict_closure(),
            known,
            unknown,
            nodes: Vec::new(),
            alias: HashMap::new(),
            binders: Vec::new(),
            used_bottom: false,
        }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::parse(self.line, msg)
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected `{c}` at column {}", self.pos + 1)))
        }
    }

    fn name(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && is_name_char(self.chars[self.pos]) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err(format!("expected identifier at column {}", start + 1)));
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn expr(&mut self) -> Result<NodeId> {
        if self.peek() == Some('μ') {
            self.pos += 1;
            let binder = self.name()?;
            self.expect('.')?;
            let placeholder = self.nodes.len();
            self.nodes.push(Node::Param(Name::from("")));
            self.binders.push((binder.clone(), placeholder));
            let body = self.expr()?;
            self.binders.pop();
            if body == placeholder {
                return Err(self.err(format!("unguarded binder `{binder}`")));
            }
            self.alias.insert(placeholder, body);
            return Ok(placeholder);
        }
        let name = self.name()?;
        if self.peek() == Some('(') {
            self.pos += 1;
            let op = self
                .sig
                .lookup(&name)
                .ok_or_else(|| self.err(format!("unknown symbol `{name}`")))?;
            if name == BOTTOM {
                self.used_bottom = true;
            }
            let mut children = Vec::new();
            if self.peek() == Some(')') {
                self.pos += 1;
            } else {
                loop {
                    children.push(self.expr()?);
                    match self.peek() {
                        Some(',') => self.pos += 1,
                        Some(')') => {
                            self.pos += 1;
                            break;
                        }
                        _ => return Err(self.err(format!("expected `,` or `)` at column {}", self.pos + 1))),
                    }
                }
            }
            if children.len() != self.sig.arity(op) {
                return Err(self.err(format!(
                    "symbol `{name}` has arity {} but was given {} arguments",
                    self.sig.arity(op),
                    children.len()
                )));
            }
            self.nodes.push(Node::Op { op, children });
            return Ok(self.nodes.len() - 1);
        }
        if let Some((_, id)) = self.binders.iter().rev().find(|(b, _)| *b == name) {
            return Ok(*id);
        }
        if self.known.contains(name.as_str()) {
            self.nodes.push(Node::Param(name.into()));
            return Ok(self.nodes.len() - 1);
        }
        if let Some(op) = self.sig.lookup(&name) {
            if self.sig.arity(op) == 0 {
                self.used_bottom |= name == BOTTOM;
                self.nodes.push(Node::Op { op, children: vec![] });
                return Ok(self.nodes.len() - 1);
            }
        }
        match self.unknown {
            Unknown::Param => {
                self.nodes.push(Node::Param(name.into()));
                Ok(self.nodes.len() - 1)
            }
            Unknown::Reject => Err(self.err(format!("unknown identifier `{name}`"))),
        }
    }

    fn finish(mut self, base: &Arc<Signature>) -> Result<RatTree> {
        let root = self.expr()?;
        if self.peek().is_some() {
            return Err(self.err(format!("trailing input at column {}", self.pos + 1)));
        }
        let resolve = |mut v: NodeId| {
            while let Some(&next) = self.alias.get(&v) {
                v = next;
            }
            v
        };
        let forward: Vec<NodeId> = (0..self.nodes.len()).map(resolve).collect();
        for node in &mut self.nodes {
            if let Node::Op { children, .. } = node {
                for c in children.iter_mut() {
                    *c = forward[*c];
                }
            }
        }
        let sig = if self.used_bottom { self.sig.clone() } else { base.clone() };
        RatTree::from_graph(sig, self.nodes, forward[root])
    }
}

/// Parses a μ-expression; unknown bare identifiers become parameters.
pub fn parse_tree(sig: &Arc<Signature>, text: &str) -> Result<RatTree> {
    ExprParser::new(text, 1, sig, &HashSet::new(), Unknown::Param).finish(sig)
}

/// Parses a μ-expression whose bare identifiers must be among `known`.
pub fn parse_tree_with(sig: &Arc<Signature>, known: &[Name], text: &str) -> Result<RatTree> {
    let known: HashSet<Name> = known.iter().cloned().collect();
    ExprParser::new(text, 1, sig, &known, Unknown::Reject).finish(sig)
}

// ---------------------------------------------------------------------------
// documents

#[derive(Debug, Default)]
struct Document {
    sig_name: Option<String>,
    ops: Vec<(String, usize)>,
    params: Vec<(usize, String)>,
    sys: Option<usize>,
    equations: Vec<(usize, String, String)>,
    carrier: Option<(usize, Vec<String>)>,
    tables: Vec<(usize, String, String)>,
    tree: Option<(usize, String)>,
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn parse_document(text: &str) -> Result<Document> {
    let mut doc = Document::default();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let (keyword, rest) = match line.split_once(char::is_whitespace) {
            Some((k, r)) => (k, r.trim()),
            None => (line, ""),
        };
        if doc.sys.is_some() && keyword != "sys" {
            let (lhs, rhs) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(line_no, "expected `VAR = RHS`"))?;
            let lhs = lhs.trim();
            if lhs.is_empty() || !lhs.chars().all(is_name_char) {
                return Err(Error::parse(line_no, format!("bad variable name `{lhs}`")));
            }
            doc.equations.push((line_no, lhs.to_string(), rhs.trim().to_string()));
            continue;
        }
        match keyword {
            "sig" => {
                if doc.sig_name.is_some() {
                    return Err(Error::parse(line_no, "duplicate `sig` header"));
                }
                doc.sig_name = Some(if rest.is_empty() { "sig".to_string() } else { rest.to_string() });
            }
            "op" => {
                if doc.sig_name.is_none() {
                    return Err(Error::parse(line_no, "`op` before `sig` header"));
                }
                let (symbol, arity) = rest
                    .rsplit_once('/')
                    .ok_or_else(|| Error::parse(line_no, "expected `op SYMBOL/ARITY`"))?;
                let symbol = symbol.trim();
                if symbol.is_empty() || !symbol.chars().all(is_name_char) {
                    return Err(Error::parse(line_no, format!("bad symbol `{symbol}`")));
                }
                let arity: usize = arity
                    .trim()
                    .parse()
                    .map_err(|_| Error::parse(line_no, format!("bad arity `{}`", arity.trim())))?;
                doc.ops.push((symbol.to_string(), arity));
            }
            "params" => {
                for p in rest.split_whitespace() {
                    if !p.chars().all(is_name_char) {
                        return Err(Error::parse(line_no, format!("bad parameter name `{p}`")));
                    }
                    doc.params.push((line_no, p.to_string()));
                }
            }
            "sys" => {
                if doc.sys.is_some() {
                    return Err(Error::parse(line_no, "duplicate `sys` header"));
                }
                doc.sys = Some(line_no);
            }
            "carrier" => {
                if doc.carrier.is_some() {
                    return Err(Error::parse(line_no, "duplicate `carrier` line"));
                }
                doc.carrier = Some((line_no, rest.split_whitespace().map(str::to_string).collect()));
            }
            "table" => {
                let (symbol, entries) = rest
                    .split_once(':')
                    .ok_or_else(|| Error::parse(line_no, "expected `table SYMBOL: ARGS->VALUE ...`"))?;
                doc.tables.push((line_no, symbol.trim().to_string(), entries.trim().to_string()));
            }
            "tree" => {
                if doc.tree.is_some() {
                    return Err(Error::parse(line_no, "duplicate `tree` line"));
                }
                doc.tree = Some((line_no, rest.to_string()));
            }
            other => return Err(Error::parse(line_no, format!("unexpected `{other}`"))),
        }
    }
    Ok(doc)
}

fn doc_signature(doc: &Document) -> Result<Arc<Signature>> {
    let name = doc
        .sig_name
        .as_deref()
        .ok_or_else(|| Error::parse(1, "missing `sig` header"))?;
    Signature::named(name, &doc.ops).map_err(|e| Error::parse(1, e.to_string()))
}

fn doc_params(doc: &Document) -> Result<Vec<Name>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (line, p) in &doc.params {
        if !seen.insert(p.clone()) {
            return Err(Error::parse(*line, format!("duplicate parameter `{p}`")));
        }
        out.push(Name::from(p.as_str()));
    }
    Ok(out)
}

/// A signature file: the `sig` block plus an optional `params` line.
pub fn parse_signature(text: &str) -> Result<(Arc<Signature>, Vec<Name>)> {
    let doc = parse_document(text)?;
    Ok((doc_signature(&doc)?, doc_params(&doc)?))
}

pub fn parse_system(text: &str) -> Result<EqSystem> {
    let doc = parse_document(text)?;
    let sig = doc_signature(&doc)?;
    let params = doc_params(&doc)?;
    if doc.sys.is_none() {
        return Err(Error::parse(1, "missing `sys` section"));
    }
    let mut vars: Vec<Name> = Vec::new();
    for (line, x, _) in &doc.equations {
        if vars.iter().any(|v| **v == **x) {
            return Err(Error::parse(*line, format!("duplicate variable `{x}`")));
        }
        if params.iter().any(|p| **p == **x) {
            return Err(Error::parse(*line, format!("`{x}` is declared as a parameter")));
        }
        vars.push(Name::from(x.as_str()));
    }
    let known: HashSet<Name> = vars.iter().chain(&params).cloned().collect();
    let mut rhs = Vec::new();
    for (line, _, text) in &doc.equations {
        let t = text.trim();
        if vars.iter().any(|v| **v == *t) {
            rhs.push(Rhs::Var(Name::from(t)));
            continue;
        }
        let tree = ExprParser::new(t, *line, &sig, &known, Unknown::Reject).finish(&sig)?;
        if let Node::Param(p) = tree.root_node() {
            if vars.contains(p) {
                rhs.push(Rhs::Var(p.clone()));
                continue;
            }
        }
        rhs.push(Rhs::Tree(tree));
    }
    EqSystem::new(sig, vars, params, rhs).map_err(|e| Error::parse(doc.sys.unwrap_or(1), e.to_string()))
}

/// A tree file (`tree` line), or a structured JSON tree document.
pub fn parse_tree_file(text: &str) -> Result<RatTree> {
    if text.trim_start().starts_with('{') {
        let doc: TreeDocument =
            serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.to_string()))?;
        return doc.into_tree();
    }
    let doc = parse_document(text)?;
    let sig = doc_signature(&doc)?;
    let params = doc_params(&doc)?;
    let (line, expr) = doc.tree.as_ref().ok_or_else(|| Error::parse(1, "missing `tree` line"))?;
    let known: HashSet<Name> = params.into_iter().collect();
    ExprParser::new(expr, *line, &sig, &known, Unknown::Reject).finish(&sig)
}

/// Renders a tree file that [`parse_tree_file`] reads back.
pub fn render_tree_file(t: &RatTree) -> String {
    let mut out = String::new();
    let base = base_signature(t.sig());
    write_sig_block(&mut out, &base);
    let params = t.params();
    if !params.is_empty() {
        out.push_str("params");
        for p in params {
            out.push(' ');
            out.push_str(&p);
        }
        out.push('\n');
    }
    out.push_str(&format!("tree {}\n", render_tree(t)));
    out
}

/// The signature without `bot`.
pub fn base_signature(sig: &Arc<Signature>) -> Arc<Signature> {
    if !sig.is_strict() {
        return sig.clone();
    }
    let decls: Vec<(&str, usize)> = sig.user_ops().iter().map(|d| (d.symbol.as_str(), d.arity)).collect();
    Signature::named(sig.name(), &decls).expect("user ops of a signature are valid")
}

pub fn parse_algebra(text: &str) -> Result<FiniteAlgebra> {
    let doc = parse_document(text)?;
    let sig = doc_signature(&doc)?;
    let (carrier_line, carrier) = doc
        .carrier
        .clone()
        .ok_or_else(|| Error::parse(1, "missing `carrier` line"))?;
    let position: HashMap<&str, usize> = carrier.iter().enumerate().map(|(i, e)| (e.as_str(), i)).collect();
    if position.len() != carrier.len() {
        return Err(Error::parse(carrier_line, "duplicate carrier element"));
    }
    let mut entries: Vec<HashMap<Vec<usize>, usize>> = vec![HashMap::new(); sig.len()];
    for (line, symbol, text) in &doc.tables {
        let op = sig
            .lookup(symbol)
            .ok_or_else(|| Error::parse(*line, format!("unknown symbol `{symbol}`")))?;
        for tuple in text.split_whitespace() {
            let (args, value) = tuple
                .split_once("->")
                .ok_or_else(|| Error::parse(*line, format!("bad table entry `{tuple}`")))?;
            let lookup = |e: &str| {
                position
                    .get(e)
                    .copied()
                    .ok_or_else(|| Error::parse(*line, format!("unknown element `{e}`")))
            };
            let args: Vec<usize> = if args.is_empty() {
                vec![]
            } else {
                args.split(',').map(lookup).collect::<Result<_>>()?
            };
            if args.len() != sig.arity(op) {
                return Err(Error::parse(*line, format!("entry `{tuple}` has wrong arity for `{symbol}`")));
            }
            if entries[op.index()].insert(args, lookup(value)?).is_some() {
                return Err(Error::parse(*line, format!("duplicate entry `{tuple}`")));
            }
        }
    }
    let n = carrier.len();
    let mut tables = Vec::with_capacity(sig.len());
    for op in sig.op_ids() {
        let ar = sig.arity(op);
        let size = n.pow(ar as u32);
        let mut table = Vec::with_capacity(size);
        for code in 0..size {
            let args = crate::finalg::decode_args(code, n, ar);
            match entries[op.index()].get(&args) {
                Some(&v) => table.push(v),
                None => {
                    let shown: Vec<&str> = args.iter().map(|&a| carrier[a].as_str()).collect();
                    return Err(Error::parse(
                        carrier_line,
                        format!("table `{}` lacks entry for ({})", sig.symbol(op), shown.join(",")),
                    ));
                }
            }
        }
        tables.push(table);
    }
    FiniteAlgebra::new(sig, carrier, tables).map_err(|e| Error::parse(carrier_line, e.to_string()))
}

// ---------------------------------------------------------------------------
// structured records

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelRecord {
    Op(String),
    Param(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub id: usize,
    pub label: LabelRecord,
    pub children: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeRecord {
    pub root: usize,
    pub nodes: Vec<NodeRecord>,
}

impl TreeRecord {
    pub fn from_tree(t: &RatTree) -> Self {
        TreeRecord {
            root: t.root(),
            nodes: t
                .nodes()
                .iter()
                .enumerate()
                .map(|(id, n)| match n {
                    Node::Op { op, children } => NodeRecord {
                        id,
                        label: LabelRecord::Op(t.sig().symbol(*op).to_string()),
                        children: children.clone(),
                    },
                    Node::Param(p) => NodeRecord {
                        id,
                        label: LabelRecord::Param(p.to_string()),
                        children: vec![],
                    },
                })
                .collect(),
        }
    }

    pub fn to_tree(&self, sig: &Arc<Signature>) -> Result<RatTree> {
        let full = sig.strict_closure();
        let mut used_bottom = false;
        let mut nodes = vec![None; self.nodes.len()];
        for rec in &self.nodes {
            if rec.id >= nodes.len() || nodes[rec.id].is_some() {
                return Err(Error::NodeOutOfRange(rec.id));
            }
            nodes[rec.id] = Some(match &rec.label {
                LabelRecord::Op(s) => {
                    let op = full.lookup(s).ok_or_else(|| Error::UnknownSymbol(s.clone()))?;
                    used_bottom |= s == BOTTOM;
                    Node::Op {
                        op,
                        children: rec.children.clone(),
                    }
                }
                LabelRecord::Param(p) => Node::Param(Name::from(p.as_str())),
            });
        }
        let nodes: Vec<Node> = nodes.into_iter().map(|n| n.expect("ids are a permutation")).collect();
        RatTree::from_graph(if used_bottom { full } else { sig.clone() }, nodes, self.root)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignatureRecord {
    pub name: String,
    pub ops: Vec<(String, usize)>,
}

impl SignatureRecord {
    pub fn from_sig(sig: &Signature) -> Self {
        SignatureRecord {
            name: sig.name().to_string(),
            ops: sig.user_ops().iter().map(|d| (d.symbol.clone(), d.arity)).collect(),
        }
    }

    pub fn to_sig(&self) -> Result<Arc<Signature>> {
        Signature::named(&self.name, &self.ops)
    }
}

/// Self-contained structured tree: `{"v":1,"sig":…,"tree":{root,nodes}}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeDocument {
    pub v: u32,
    pub sig: SignatureRecord,
    pub tree: TreeRecord,
}

impl TreeDocument {
    pub fn new(t: &RatTree) -> Self {
        TreeDocument {
            v: 1,
            sig: SignatureRecord::from_sig(t.sig()),
            tree: TreeRecord::from_tree(t),
        }
    }

    pub fn into_tree(self) -> Result<RatTree> {
        if self.v != 1 {
            return Err(Error::parse(1, format!("unsupported schema version {}", self.v)));
        }
        self.tree.to_tree(&self.sig.to_sig()?)
    }
}
