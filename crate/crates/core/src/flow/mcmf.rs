//! Min-cost max-flow by primal-dual augmentation: Dijkstra on reduced costs
//! sets the potentials, then blocking flows saturate every zero-reduced-cost
//! shortest path before the next Dijkstra round.
//!
//! Arc costs are rationals. They are scaled by the lcm of their denominators
//! into integers; the fast path keeps those in `i128` and reports overflow,
//! [`min_cost_max_flow_big`] uses arbitrary precision throughout.

use std::cell::Cell;
use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::dinic::augment_to_max;
use super::{FlowError, FlowNetwork};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinCostFlow {
    pub value: u64,
    pub cost: BigRational,
    /// Per forward arc, in insertion order.
    pub arc_flows: Vec<u64>,
}

trait CostNum: Clone + Ord + Debug {
    fn zero() -> Self;
    fn add(&self, o: &Self) -> Result<Self, FlowError>;
    fn sub(&self, o: &Self) -> Result<Self, FlowError>;
    fn from_u128(v: u128) -> Result<Self, FlowError>;
    fn mul_u64(&self, k: u64) -> Result<Self, FlowError>;
    fn to_bigint(&self) -> BigInt;
}

impl CostNum for i128 {
    fn zero() -> Self {
        0
    }
    fn add(&self, o: &Self) -> Result<Self, FlowError> {
        self.checked_add(*o).ok_or(FlowError::CostOverflow)
    }
    fn sub(&self, o: &Self) -> Result<Self, FlowError> {
        self.checked_sub(*o).ok_or(FlowError::CostOverflow)
    }
    fn from_u128(v: u128) -> Result<Self, FlowError> {
        i128::try_from(v).map_err(|_| FlowError::CostOverflow)
    }
    fn mul_u64(&self, k: u64) -> Result<Self, FlowError> {
        self.checked_mul(k as i128).ok_or(FlowError::CostOverflow)
    }
    fn to_bigint(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl CostNum for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn add(&self, o: &Self) -> Result<Self, FlowError> {
        Ok(self + o)
    }
    fn sub(&self, o: &Self) -> Result<Self, FlowError> {
        Ok(self - o)
    }
    fn from_u128(v: u128) -> Result<Self, FlowError> {
        Ok(BigInt::from(v))
    }
    fn mul_u64(&self, k: u64) -> Result<Self, FlowError> {
        Ok(self * k)
    }
    fn to_bigint(&self) -> BigInt {
        self.clone()
    }
}

/// Fast path with 128-bit scaled costs. Fails with
/// [`FlowError::CostOverflow`] when the common denominator or an
/// intermediate distance does not fit; callers then retry with
/// [`min_cost_max_flow_big`].
pub fn min_cost_max_flow(net: &mut FlowNetwork) -> Result<MinCostFlow, FlowError> {
    let scale = lcm_u128(net)?;
    let costs = scaled_costs::<i128>(net, &BigInt::from(scale), |num, mult| {
        let m = mult.to_u128().ok_or(FlowError::CostOverflow)?;
        (num as u128).checked_mul(m).ok_or(FlowError::CostOverflow).and_then(i128::from_u128)
    })?;
    solve(net, costs, BigInt::from(scale))
}

/// Arbitrary-precision variant; never overflows.
pub fn min_cost_max_flow_big(net: &mut FlowNetwork) -> Result<MinCostFlow, FlowError> {
    let mut scale = BigInt::from(1u32);
    for k in 0..net.num_arcs() {
        scale = scale.lcm(&BigInt::from(*net.forward_cost(k).denom()));
    }
    let costs = scaled_costs::<BigInt>(net, &scale, |num, mult| Ok(mult * num))?;
    solve(net, costs, scale)
}

fn lcm_u128(net: &FlowNetwork) -> Result<u128, FlowError> {
    let mut l: u128 = 1;
    for k in 0..net.num_arcs() {
        let d = *net.forward_cost(k).denom() as u128;
        l = (l / l.gcd(&d)).checked_mul(d).ok_or(FlowError::CostOverflow)?;
    }
    // Leave headroom for path sums: potentials add up to |V| scaled costs.
    if l > (i128::MAX as u128) >> 40 {
        return Err(FlowError::CostOverflow);
    }
    Ok(l)
}

/// Scaled integer cost for every residual arc (twins negated).
fn scaled_costs<C: CostNum>(
    net: &FlowNetwork,
    scale: &BigInt,
    convert: impl Fn(u64, &BigInt) -> Result<C, FlowError>,
) -> Result<Vec<C>, FlowError> {
    let mut out = Vec::with_capacity(2 * net.num_arcs());
    for k in 0..net.num_arcs() {
        let c = net.forward_cost(k);
        let mult = scale / BigInt::from(*c.denom());
        let fwd = convert(*c.numer(), &mult)?;
        let back = C::zero().sub(&fwd)?;
        out.push(fwd);
        out.push(back);
    }
    Ok(out)
}

fn solve<C: CostNum>(net: &mut FlowNetwork, cost: Vec<C>, scale: BigInt) -> Result<MinCostFlow, FlowError> {
    net.reset_flow();
    let n = net.num_nodes();
    let (s, t) = (net.source(), net.sink());
    let mut pot = vec![C::zero(); n];
    let mut dist: Vec<Option<C>> = vec![None; n];
    let mut value = 0u64;

    loop {
        dist.fill(None);
        dist[s] = Some(C::zero());
        let mut heap = BinaryHeap::new();
        heap.push(Reverse((C::zero(), s)));
        while let Some(Reverse((d, v))) = heap.pop() {
            if dist[v].as_ref() != Some(&d) {
                continue;
            }
            for &e in net.adj(v) {
                if net.residual(e) == 0 {
                    continue;
                }
                let w = net.head(e);
                let reduced = cost[e].add(&pot[v])?.sub(&pot[w])?;
                debug_assert!(reduced >= C::zero(), "negative reduced cost on arc {e}");
                let nd = d.add(&reduced)?;
                if dist[w].as_ref().is_none_or(|cur| nd < *cur) {
                    dist[w] = Some(nd.clone());
                    heap.push(Reverse((nd, w)));
                }
            }
        }
        let Some(dt) = dist[t].clone() else { break };
        for v in 0..n {
            let step = match &dist[v] {
                Some(d) if *d < dt => d.clone(),
                _ => dt.clone(),
            };
            pot[v] = pot[v].add(&step)?;
        }

        let overflow = Cell::new(false);
        let pushed = augment_to_max(net, |net, e| {
            let from = net.head(e ^ 1);
            let to = net.head(e);
            match cost[e].add(&pot[from]).and_then(|x| x.sub(&pot[to])) {
                Ok(r) => r == C::zero(),
                Err(_) => {
                    overflow.set(true);
                    false
                }
            }
        });
        if overflow.get() {
            return Err(FlowError::CostOverflow);
        }
        if pushed == 0 {
            break;
        }
        value += pushed;
    }

    let mut total = <BigInt as Zero>::zero();
    for k in 0..net.num_arcs() {
        let f = net.arc_flow(k);
        if f > 0 {
            total += cost[2 * k].mul_u64(f)?.to_bigint();
        }
    }
    Ok(MinCostFlow {
        value,
        cost: BigRational::new(total, scale),
        arc_flows: net.arc_flows(),
    })
}
