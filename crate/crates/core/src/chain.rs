//! Markov chains induced by a strategy profile, and exact objective values.

use num_traits::{One, Zero};

use crate::arena::{Arena, Color, InitializedArena, Player, StateId};
use crate::linalg;
use crate::objective::{Context, Objective, Value};
use crate::rational::{self, Rational};
use crate::scc;
use crate::strategy::{Machine, Pairs, Profile, NONE};
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Node {
    pub state: StateId,
    pub m1: u32,
    pub m2: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub to: usize,
    /// Index into [`InducedChain::colors`].
    pub color: usize,
    pub prob: Rational,
}

/// Finite colored Markov chain over `(state, P1 memory, P2 memory)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedChain {
    pub nodes: Vec<Node>,
    pub edges: Vec<Vec<Edge>>,
    /// Sorted distinct colors of the arena.
    pub colors: Vec<Color>,
    /// Node of each initial arena state, in the arena's initial order.
    pub initial: Vec<usize>,
}

impl InducedChain {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn successors(&self) -> Vec<Vec<usize>> {
        self.edges.iter().map(|es| es.iter().map(|e| e.to).collect()).collect()
    }
}

/// Arena data precomputed once and shared by many chain inductions.
#[derive(Debug, Clone)]
pub(crate) struct Compiled<'a> {
    pub arena: &'a Arena,
    pub pairs: Pairs,
    pub colors: Vec<Color>,
    pub pair_color: Vec<usize>,
    pub starts: Vec<StateId>,
}

impl<'a> Compiled<'a> {
    pub fn new(arena: &'a Arena, starts: Vec<StateId>) -> Self {
        let colors = arena.colors();
        let pair_color = arena
            .states()
            .iter()
            .flat_map(|s| s.actions.iter())
            .map(|x| colors.binary_search(&x.color).expect("listed color"))
            .collect();
        Compiled { arena, pairs: Pairs::new(arena), colors, pair_color, starts }
    }

    pub fn of(a: &'a InitializedArena) -> Self {
        Self::new(a.arena(), a.initial().to_vec())
    }

    pub fn chain(&self, m1: &Machine, m2: &Machine) -> Result<InducedChain, Error> {
        debug_assert!(m1.player == Player::One && m2.player == Player::Two);
        let (k1, k2) = (m1.mems, m2.mems);
        let slot = |n: &Node| (n.state * k1 + n.m1 as usize) * k2 + n.m2 as usize;
        let mut index = vec![usize::MAX; self.arena.len() * k1 * k2];
        let mut nodes = Vec::new();
        let mut initial = Vec::with_capacity(self.starts.len());
        let mut push = |n: Node, nodes: &mut Vec<Node>| -> usize {
            let i = slot(&n);
            if index[i] == usize::MAX {
                index[i] = nodes.len();
                nodes.push(n);
            }
            index[i]
        };
        for &s in &self.starts {
            initial.push(push(Node { state: s, m1: m1.init, m2: m2.init }, &mut nodes));
        }
        let mut edges: Vec<Vec<Edge>> = Vec::new();
        let mut next = 0;
        while next < nodes.len() {
            let n = nodes[next];
            next += 1;
            let st = self.arena.state(n.state);
            let (machine, mem) = match st.owner {
                Player::One => (m1, n.m1),
                Player::Two => (m2, n.m2),
            };
            let act = machine.action(n.state, mem);
            if act == NONE {
                return Err(Error::PartialStrategy {
                    player: st.owner,
                    state: st.name.clone(),
                    memory: machine.mem_names[mem as usize].clone(),
                });
            }
            let pair = self.pairs.id(n.state, act as usize);
            let (n1, n2) = (m1.step(n.m1, pair), m2.step(n.m2, pair));
            let color = self.pair_color[pair];
            let out = st.actions[act as usize]
                .dist
                .iter()
                .map(|(t, p)| Edge { to: push(Node { state: *t, m1: n1, m2: n2 }, &mut nodes), color, prob: p.clone() })
                .collect();
            edges.push(out);
        }
        Ok(InducedChain { nodes, edges, colors: self.colors.clone(), initial })
    }
}

/// The chain induced on `a` by `profile`.
pub fn induce_chain(a: &InitializedArena, profile: &Profile) -> Result<InducedChain, Error> {
    let m1 = profile.p1.compile(a.arena())?;
    let m2 = profile.p2.compile(a.arena())?;
    Compiled::of(a).chain(&m1, &m2)
}

/// Bottom strongly connected components.
pub fn bsccs(chain: &InducedChain) -> Vec<Vec<usize>> {
    scc::bottom_sccs(&chain.successors())
}

/// Probability of eventually entering each BSCC from `from`.
pub fn absorption_probabilities(chain: &InducedChain, from: usize) -> Vec<(Vec<usize>, Rational)> {
    let bottoms = bsccs(chain);
    let mut out = Vec::with_capacity(bottoms.len());
    for b in bottoms {
        let mut goal = vec![false; chain.len()];
        for &v in &b {
            goal[v] = true;
        }
        let p = hit_probabilities(&chain.edges, &goal, |_| false)[from].clone();
        out.push((b, p));
    }
    out
}

/// Probability, from every node, of entering a `goal` node or taking an
/// edge with `goal_edge`. Nodes that cannot reach the goal get 0 and nodes
/// that reach it surely get 1 before the remaining system is solved.
fn hit_probabilities(edges: &[Vec<Edge>], goal: &[bool], goal_edge: impl Fn(&Edge) -> bool) -> Vec<Rational> {
    let n = edges.len();
    let hits = |e: &Edge| goal_edge(e) || goal[e.to];
    // can[v]: some path reaches the goal.
    let mut can = goal.to_vec();
    loop {
        let mut changed = false;
        for v in 0..n {
            if !can[v] && edges[v].iter().any(|e| hits(e) || can[e.to]) {
                can[v] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    // risky[v]: a node that cannot reach the goal is reachable while avoiding it.
    let mut risky: Vec<bool> = (0..n).map(|v| !can[v]).collect();
    loop {
        let mut changed = false;
        for v in 0..n {
            if !risky[v] && !goal[v] && edges[v].iter().any(|e| !hits(e) && risky[e.to]) {
                risky[v] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut value: Vec<Rational> = (0..n)
        .map(|v| if goal[v] || (can[v] && !risky[v]) { Rational::one() } else { Rational::zero() })
        .collect();
    let unknown: Vec<usize> = (0..n).filter(|&v| can[v] && risky[v] && !goal[v]).collect();
    if unknown.is_empty() {
        return value;
    }
    let mut pos = vec![usize::MAX; n];
    for (i, &v) in unknown.iter().enumerate() {
        pos[v] = i;
    }
    let k = unknown.len();
    let mut a = vec![vec![Rational::zero(); k]; k];
    let mut b = vec![Rational::zero(); k];
    for (i, &v) in unknown.iter().enumerate() {
        a[i][i] += Rational::one();
        for e in &edges[v] {
            if hits(e) {
                b[i] += &e.prob;
            } else if pos[e.to] != usize::MAX {
                a[i][pos[e.to]] -= &e.prob;
            } else if !value[e.to].is_zero() {
                b[i] += &e.prob * &value[e.to];
            }
        }
    }
    let x = linalg::solve_vec(a, b).expect("hitting-probability system is nonsingular once zero states are removed");
    for (i, v) in unknown.into_iter().enumerate() {
        value[v] = x[i].clone();
    }
    value
}

/// Probability that the largest color seen is even, from every initial node.
pub fn weak_parity_value(chain: &InducedChain, ctx: &Context) -> Result<Vec<Rational>, Error> {
    let Context::WeakParity(seed) = ctx else {
        return Err(Error::InvalidObjective("weak parity needs a running-max context".into()));
    };
    if let Some(bad) = chain.colors.iter().chain(seed.iter()).find(|c| rational::as_natural(c).is_none()) {
        return Err(Error::NonIntegerColor(bad.clone()));
    }
    let mut levels = chain.colors.clone();
    if let Some(c) = seed {
        levels.push(c.clone());
    }
    levels.sort();
    levels.dedup();
    let level_of: Vec<usize> = chain.colors.iter().map(|c| levels.binary_search(c).expect("level")).collect();
    let none = levels.len();
    let width = levels.len() + 1;
    let start_mem = seed.as_ref().map_or(none, |c| levels.binary_search(c).expect("level"));

    // Product of the chain with the running maximum.
    let mut index = vec![usize::MAX; chain.len() * width];
    let mut nodes: Vec<(usize, usize)> = Vec::new();
    let mut push = |v: usize, m: usize, nodes: &mut Vec<(usize, usize)>| {
        let i = v * width + m;
        if index[i] == usize::MAX {
            index[i] = nodes.len();
            nodes.push((v, m));
        }
        index[i]
    };
    let initial: Vec<usize> = chain.initial.iter().map(|&v| push(v, start_mem, &mut nodes)).collect();
    let mut edges: Vec<Vec<Edge>> = Vec::new();
    let mut next = 0;
    while next < nodes.len() {
        let (v, m) = nodes[next];
        next += 1;
        let out = chain.edges[v]
            .iter()
            .map(|e| {
                let lvl = level_of[e.color];
                let m2 = if m == none { lvl } else { m.max(lvl) };
                Edge { to: push(e.to, m2, &mut nodes), color: e.color, prob: e.prob.clone() }
            })
            .collect();
        edges.push(out);
    }
    let succ: Vec<Vec<usize>> = edges.iter().map(|es| es.iter().map(|e| e.to).collect()).collect();
    let mut goal = vec![false; nodes.len()];
    for b in scc::bottom_sccs(&succ) {
        let m = nodes[b[0]].1;
        for &u in &b {
            assert_eq!(nodes[u].1, m, "running maximum is constant on a bottom component");
            for e in &edges[u] {
                assert!(level_of[e.color] <= m, "bottom component colors never exceed its maximum");
            }
        }
        if rational::is_even_integer(&levels[m]) {
            for &u in &b {
                goal[u] = true;
            }
        }
    }
    let values = hit_probabilities(&edges, &goal, |_| false);
    Ok(initial.into_iter().map(|u| values[u].clone()).collect())
}

/// Probability of seeing color `target`, from every initial node.
pub fn reachability_value(chain: &InducedChain, ctx: &Context, target: &Color) -> Result<Vec<Rational>, Error> {
    let Context::Reach(seen) = ctx else {
        return Err(Error::InvalidObjective("reachability needs a seen-flag context".into()));
    };
    if *seen {
        return Ok(vec![Rational::one(); chain.initial.len()]);
    }
    let Ok(c) = chain.colors.binary_search(target) else {
        return Ok(vec![Rational::zero(); chain.initial.len()]);
    };
    let values = hit_probabilities(&chain.edges, &vec![false; chain.len()], |e| e.color == c);
    Ok(chain.initial.iter().map(|&v| values[v].clone()).collect())
}

fn disc_context(ctx: &Context) -> Result<(&Rational, &Rational), Error> {
    match ctx {
        Context::Disc { offset, scale } => Ok((offset, scale)),
        _ => Err(Error::InvalidObjective("discounted objectives need an (offset, scale) context".into())),
    }
}

/// Expected discounted sum, from every initial node.
pub fn disc_expectation_value(chain: &InducedChain, ctx: &Context, lambda: &Rational) -> Result<Vec<Rational>, Error> {
    let (offset, scale) = disc_context(ctx)?;
    let n = chain.len();
    // (I - λP) v = r
    let mut a = vec![vec![Rational::zero(); n]; n];
    let mut r = vec![Rational::zero(); n];
    for v in 0..n {
        a[v][v] += Rational::one();
        for e in &chain.edges[v] {
            r[v] += &e.prob * &chain.colors[e.color];
            a[v][e.to] -= &e.prob * lambda;
        }
    }
    let x = linalg::solve_vec(a, r).expect("I - λP is nonsingular for λ < 1");
    Ok(chain.initial.iter().map(|&v| offset + scale * &x[v]).collect())
}

/// Probability that the discounted sum reaches `threshold`, from every
/// initial node. Only chains whose transient part is acyclic and whose
/// bottom components carry color 0 only are supported.
pub fn disc_threshold_value(
    chain: &InducedChain,
    ctx: &Context,
    lambda: &Rational,
    threshold: &Rational,
) -> Result<Vec<Rational>, Error> {
    let (offset, scale) = disc_context(ctx)?;
    let succ = chain.successors();
    let comps = scc::sccs(&succ);
    let of = scc::component_of(chain.len(), &comps);
    let mut bottom = vec![false; chain.len()];
    for (c, comp) in comps.iter().enumerate() {
        let closed = comp.iter().all(|&v| succ[v].iter().all(|&w| of[w] == c));
        if closed {
            for &v in comp {
                if chain.edges[v].iter().any(|e| !chain.colors[e.color].is_zero()) {
                    return Err(Error::UnsupportedChainShape(format!(
                        "bottom component through node {v} carries a nonzero color"
                    )));
                }
                bottom[v] = true;
            }
        } else if comp.len() > 1 || succ[comp[0]].contains(&comp[0]) {
            return Err(Error::UnsupportedChainShape(format!("transient cycle through node {}", comp[0])));
        }
    }
    struct Walk<'c> {
        chain: &'c InducedChain,
        bottom: &'c [bool],
        lambda: &'c Rational,
        offset: &'c Rational,
        scale: &'c Rational,
        threshold: &'c Rational,
    }
    impl Walk<'_> {
        fn go(&self, v: usize, prob: Rational, sum: Rational, weight: Rational) -> Rational {
            if self.bottom[v] {
                let total = self.offset + self.scale * &sum;
                return if total >= *self.threshold { prob } else { Rational::zero() };
            }
            let mut acc = Rational::zero();
            for e in &self.chain.edges[v] {
                let s = &sum + &weight * &self.chain.colors[e.color];
                acc += self.go(e.to, &prob * &e.prob, s, &weight * self.lambda);
            }
            acc
        }
    }
    let walk = Walk { chain, bottom: &bottom, lambda, offset, scale, threshold };
    Ok(chain
        .initial
        .iter()
        .map(|&v| walk.go(v, Rational::one(), Rational::zero(), Rational::one()))
        .collect())
}

/// Values of `objective` under `ctx` from every initial node.
pub fn chain_values(chain: &InducedChain, objective: &Objective, ctx: &Context) -> Result<Vec<Rational>, Error> {
    if !objective.context_matches(ctx) {
        return Err(Error::InvalidObjective(format!("context {ctx:?} does not belong to {objective}")));
    }
    match objective {
        Objective::WeakParity => weak_parity_value(chain, ctx),
        Objective::Reach(c) => reachability_value(chain, ctx, c),
        Objective::DiscExpect(l) => disc_expectation_value(chain, ctx, l),
        Objective::DiscThreshold { lambda, threshold } => disc_threshold_value(chain, ctx, lambda, threshold),
    }
}

/// Value of `profile` from every initial state of `a`, in `a.initial()` order.
pub fn evaluate(a: &InitializedArena, profile: &Profile, objective: &Objective, ctx: &Context) -> Result<Vec<Value>, Error> {
    objective.check_colors(&a.arena().colors())?;
    let chain = induce_chain(a, profile)?;
    Ok(chain_values(&chain, objective, ctx)?.into_iter().map(|v| objective.value(v)).collect())
}

/// Value from the initial objective context.
pub fn evaluate_plain(a: &InitializedArena, profile: &Profile, objective: &Objective) -> Result<Vec<Rational>, Error> {
    let ctx = objective.initial_context();
    Ok(evaluate(a, profile, objective, &ctx)?.into_iter().map(|v| v.amount).collect())
}
