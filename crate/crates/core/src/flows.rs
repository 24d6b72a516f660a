//! The cohomological equation `f = F(. + s) - F` on the real line for
//! compactly supported, continuous piecewise-linear `f` with rational data.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::ring::Scalar;

/// A continuous piecewise-linear function, zero outside
/// `[breakpoints[0], breakpoints[last]]`.
///
/// Stored canonically: no interior breakpoint is collinear with its
/// neighbours, and the zero function has no breakpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiecewiseLinearFn {
    breakpoints: Vec<Scalar>,
    values: Vec<Scalar>,
}

fn collinear(x0: &Scalar, y0: &Scalar, x1: &Scalar, y1: &Scalar, x2: &Scalar, y2: &Scalar) -> bool {
    (y1 - y0) * (x2 - x1) == (y2 - y1) * (x1 - x0)
}

/// Drops interior points collinear with their neighbours.
fn simplify(points: Vec<(Scalar, Scalar)>) -> Vec<(Scalar, Scalar)> {
    let mut out: Vec<(Scalar, Scalar)> = Vec::with_capacity(points.len());
    for p in points {
        while out.len() >= 2 {
            let (a, b) = (&out[out.len() - 2], &out[out.len() - 1]);
            if collinear(&a.0, &a.1, &b.0, &b.1, &p.0, &p.1) {
                out.pop();
            } else {
                break;
            }
        }
        out.push(p);
    }
    out
}

fn interpolate(x0: &Scalar, y0: &Scalar, x1: &Scalar, y1: &Scalar, x: &Scalar) -> Scalar {
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

fn sorted_unique(mut xs: Vec<Scalar>) -> Vec<Scalar> {
    xs.sort();
    xs.dedup();
    xs
}

impl PiecewiseLinearFn {
    pub fn new(breakpoints: Vec<Scalar>, values: Vec<Scalar>) -> Result<Self> {
        if breakpoints.len() != values.len() {
            return Err(Error::InvalidPiecewiseLinear(
                "breakpoints and values differ in length".into(),
            ));
        }
        if !breakpoints.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidPiecewiseLinear(
                "breakpoints must increase strictly".into(),
            ));
        }
        if let (Some(first), Some(last)) = (values.first(), values.last()) {
            if !first.is_zero() || !last.is_zero() {
                return Err(Error::InvalidPiecewiseLinear(
                    "a compactly supported continuous function vanishes at its end breakpoints".into(),
                ));
            }
        }
        Ok(Self::from_points(breakpoints.into_iter().zip(values).collect()))
    }

    /// Canonicalizes sorted samples whose end values are zero.
    fn from_points(points: Vec<(Scalar, Scalar)>) -> Self {
        let mut points = simplify(points);
        // strip zero runs at the ends, keeping one zero endpoint each side
        while points.len() >= 2 && points[0].1.is_zero() && points[1].1.is_zero() {
            points.remove(0);
        }
        while points.len() >= 2 && points[points.len() - 1].1.is_zero() && points[points.len() - 2].1.is_zero() {
            points.pop();
        }
        if points.iter().all(|(_, y)| y.is_zero()) {
            points.clear();
        }
        let (breakpoints, values) = points.into_iter().unzip();
        PiecewiseLinearFn { breakpoints, values }
    }

    pub fn zero() -> Self {
        PiecewiseLinearFn {
            breakpoints: Vec::new(),
            values: Vec::new(),
        }
    }

    /// The tent on `[left, right]` with the given height at the midpoint.
    pub fn hat(left: Scalar, right: Scalar, height: Scalar) -> Result<Self> {
        if left >= right {
            return Err(Error::InvalidPiecewiseLinear("empty hat support".into()));
        }
        let mid = (&left + &right) / Scalar::from_integer(2.into());
        Self::new(vec![left, mid, right], vec![Scalar::zero(), height, Scalar::zero()])
    }

    pub fn breakpoints(&self) -> &[Scalar] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[Scalar] {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.breakpoints.is_empty()
    }

    /// `[a, b]` outside of which the function vanishes.
    pub fn support(&self) -> Option<(Scalar, Scalar)> {
        Some((self.breakpoints.first()?.clone(), self.breakpoints.last()?.clone()))
    }

    pub fn evaluate(&self, x: &Scalar) -> Scalar {
        let bp = &self.breakpoints;
        match bp.binary_search(x) {
            Ok(k) => self.values[k].clone(),
            Err(k) if k == 0 || k == bp.len() => Scalar::zero(),
            Err(k) => interpolate(&bp[k - 1], &self.values[k - 1], &bp[k], &self.values[k], x),
        }
    }

    /// `x -> f(x - t)`.
    pub fn translate(&self, t: &Scalar) -> Self {
        PiecewiseLinearFn {
            breakpoints: self.breakpoints.iter().map(|b| b + t).collect(),
            values: self.values.clone(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        PiecewiseLinearFn {
            breakpoints: self.breakpoints.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    /// `sum_k c_k f_k`, exact.
    pub fn linear_combination(terms: &[(Scalar, &PiecewiseLinearFn)]) -> Self {
        let xs = sorted_unique(terms.iter().flat_map(|(_, f)| f.breakpoints.iter().cloned()).collect());
        let points = xs
            .into_iter()
            .map(|x| {
                let y = terms
                    .iter()
                    .fold(Scalar::zero(), |acc, (c, f)| acc + c * f.evaluate(&x));
                (x, y)
            })
            .collect();
        Self::from_points(points)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::linear_combination(&[(Scalar::one(), self), (Scalar::one(), other)])
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::linear_combination(&[(Scalar::one(), self), (-Scalar::one(), other)])
    }
}

/// Reduction of `x` into `[0, s)`.
fn reduce_mod(x: &Scalar, s: &Scalar) -> Scalar {
    x - s * (x / s).floor()
}

fn check_period(s: &Scalar) -> Result<()> {
    if *s <= Scalar::zero() {
        Err(Error::NonPositivePeriod)
    } else {
        Ok(())
    }
}

/// An `s`-periodic continuous piecewise-linear function, described on `[0, s)`.
/// Breakpoints always include 0; the others are genuine kinks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodicProfile {
    period: Scalar,
    breakpoints: Vec<Scalar>,
    values: Vec<Scalar>,
}

impl PeriodicProfile {
    pub fn new(period: Scalar, breakpoints: Vec<Scalar>, values: Vec<Scalar>) -> Result<Self> {
        check_period(&period)?;
        if breakpoints.len() != values.len() || breakpoints.first() != Some(&Scalar::zero()) {
            return Err(Error::InvalidPiecewiseLinear(
                "a periodic profile needs matching breakpoints starting at 0".into(),
            ));
        }
        if !breakpoints.windows(2).all(|w| w[0] < w[1]) || breakpoints.last().is_some_and(|b| *b >= period) {
            return Err(Error::InvalidPiecewiseLinear(
                "profile breakpoints must increase strictly inside [0, s)".into(),
            ));
        }
        Ok(Self::from_samples(
            period,
            breakpoints.into_iter().zip(values).collect(),
        ))
    }

    fn from_samples(period: Scalar, samples: Vec<(Scalar, Scalar)>) -> Self {
        let wrap = (period.clone(), samples[0].1.clone());
        let mut points = simplify(samples.into_iter().chain([wrap]).collect());
        points.pop();
        let (breakpoints, values) = points.into_iter().unzip();
        PeriodicProfile {
            period,
            breakpoints,
            values,
        }
    }

    pub fn zero(period: Scalar) -> Result<Self> {
        Self::new(period, vec![Scalar::zero()], vec![Scalar::zero()])
    }

    pub fn period(&self) -> &Scalar {
        &self.period
    }

    pub fn breakpoints(&self) -> &[Scalar] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[Scalar] {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }

    pub fn evaluate(&self, x: &Scalar) -> Scalar {
        let y = reduce_mod(x, &self.period);
        let bp = &self.breakpoints;
        match bp.binary_search(&y) {
            Ok(k) => self.values[k].clone(),
            Err(k) if k == bp.len() => interpolate(&bp[k - 1], &self.values[k - 1], &self.period, &self.values[0], &y),
            Err(k) => interpolate(&bp[k - 1], &self.values[k - 1], &bp[k], &self.values[k], &y),
        }
    }

    /// All kinks (and period starts) inside `[lo, hi]`.
    pub fn breakpoints_in(&self, lo: &Scalar, hi: &Scalar) -> Vec<Scalar> {
        let mut out = Vec::new();
        let mut base = &self.period * (lo / &self.period).floor();
        while base <= *hi {
            for b in &self.breakpoints {
                let x = &base + b;
                if x >= *lo && x <= *hi {
                    out.push(x);
                }
            }
            base += &self.period;
        }
        out
    }
}

/// The class of `f` on `R / sZ`: `P(x) = sum_k f(x + ks)`.
pub fn periodization(f: &PiecewiseLinearFn, s: &Scalar) -> Result<PeriodicProfile> {
    check_period(s)?;
    let Some((a, b)) = f.support() else {
        return PeriodicProfile::zero(s.clone());
    };
    let xs = sorted_unique(
        std::iter::once(Scalar::zero())
            .chain(f.breakpoints.iter().map(|x| reduce_mod(x, s)))
            .collect(),
    );
    let samples = xs
        .into_iter()
        .map(|y| {
            // k ranges over shifts with y + ks in [a, b]
            let k_lo = ((&a - &y) / s).ceil().to_integer();
            let k_hi = ((&b - &y) / s).floor().to_integer();
            let mut total = Scalar::zero();
            let mut k = k_lo;
            while k <= k_hi {
                total += f.evaluate(&(&y + s * Scalar::from_integer(k.clone())));
                k += 1;
            }
            (y, total)
        })
        .collect();
    Ok(PeriodicProfile::from_samples(s.clone(), samples))
}

/// `F(x) = sum_{k >= 1} f(x - ks)`: zero for `x <= lower`, given by
/// `compact` on `[lower, upper]`, and by `profile` for `x >= upper`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventuallyPeriodicFn {
    lower: Scalar,
    upper: Scalar,
    compact: Vec<(Scalar, Scalar)>,
    profile: PeriodicProfile,
}

impl EventuallyPeriodicFn {
    pub fn new(lower: Scalar, upper: Scalar, compact: Vec<(Scalar, Scalar)>, profile: PeriodicProfile) -> Result<Self> {
        let ok = lower <= upper
            && compact.first().is_some_and(|(x, y)| *x == lower && y.is_zero())
            && compact
                .last()
                .is_some_and(|(x, y)| *x == upper && *y == profile.evaluate(&upper))
            && compact
                .windows(2)
                .all(|w| w[0].0 < w[1].0 || (w[0].0 == w[1].0 && lower == upper));
        if !ok {
            return Err(Error::InvalidPiecewiseLinear(
                "compact part must run continuously from 0 at the lower threshold to the profile at the upper one"
                    .into(),
            ));
        }
        Ok(EventuallyPeriodicFn {
            lower,
            upper,
            compact,
            profile,
        })
    }

    pub fn lower(&self) -> &Scalar {
        &self.lower
    }

    pub fn upper(&self) -> &Scalar {
        &self.upper
    }

    pub fn compact(&self) -> &[(Scalar, Scalar)] {
        &self.compact
    }

    pub fn profile(&self) -> &PeriodicProfile {
        &self.profile
    }

    pub fn evaluate(&self, x: &Scalar) -> Scalar {
        if *x <= self.lower {
            return Scalar::zero();
        }
        if *x >= self.upper {
            return self.profile.evaluate(x);
        }
        let k = self.compact.partition_point(|(b, _)| b <= x);
        let ((x0, y0), (x1, y1)) = (&self.compact[k - 1], &self.compact[k]);
        interpolate(x0, y0, x1, y1, x)
    }

    /// Every point in `[lo, hi]` where the function may fail to be linear.
    pub fn breakpoints_in(&self, lo: &Scalar, hi: &Scalar) -> Vec<Scalar> {
        let mut out: Vec<Scalar> = self
            .compact
            .iter()
            .map(|(x, _)| x.clone())
            .filter(|x| x >= lo && x <= hi)
            .collect();
        if self.upper <= *hi {
            let from = if *lo > self.upper {
                lo.clone()
            } else {
                self.upper.clone()
            };
            out.extend(self.profile.breakpoints_in(&from, hi));
        }
        out
    }

    /// Compact support, when the periodic tail vanishes.
    pub fn as_compact(&self) -> Option<PiecewiseLinearFn> {
        self.profile
            .is_zero()
            .then(|| PiecewiseLinearFn::from_points(self.compact.clone()))
    }
}

/// The primitive `F` with `f = F(. + s) - F`, normalized to vanish near `-inf`.
pub fn flow_primitive(f: &PiecewiseLinearFn, s: &Scalar) -> Result<EventuallyPeriodicFn> {
    let profile = periodization(f, s)?;
    let Some((a, b)) = f.support() else {
        return EventuallyPeriodicFn::new(
            Scalar::zero(),
            Scalar::zero(),
            vec![(Scalar::zero(), Scalar::zero())],
            profile,
        );
    };
    // breakpoints of sum_{k>=1} f(x - ks) inside [a, b]
    let mut xs = vec![a.clone(), b.clone()];
    for bp in &f.breakpoints {
        let mut x = bp + s;
        while x <= b {
            if x >= a {
                xs.push(x.clone());
            }
            x += s;
        }
    }
    let compact = sorted_unique(xs)
        .into_iter()
        .map(|x| {
            let mut total = Scalar::zero();
            let mut y = &x - s;
            while y >= a {
                total += f.evaluate(&y);
                y -= s;
            }
            (x, total)
        })
        .collect();
    EventuallyPeriodicFn::new(a, b, simplify(compact), profile)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CompactSolution {
    Primitive(PiecewiseLinearFn),
    Obstruction(PeriodicProfile),
}

/// A compactly supported primitive exactly when the periodization vanishes.
pub fn compact_primitive(f: &PiecewiseLinearFn, s: &Scalar) -> Result<CompactSolution> {
    let flow = flow_primitive(f, s)?;
    Ok(match flow.as_compact() {
        Some(p) => CompactSolution::Primitive(p),
        None => CompactSolution::Obstruction(flow.profile().clone()),
    })
}

/// Checks `f(x) = F(x + s) - F(x)` for all real `x`, exactly.
///
/// Both sides are piecewise linear; they agree for `x <= lower - s` (both 0)
/// and for `x >= max(upper, supp f)` (the periodic tail cancels), so it is
/// enough to compare at every breakpoint of either side in between.
pub fn verify_flow_identity(f: &PiecewiseLinearFn, s: &Scalar, big_f: &EventuallyPeriodicFn) -> Result<bool> {
    check_period(s)?;
    if big_f.profile().period() != s {
        return Ok(false);
    }
    let mut lo = big_f.lower() - s;
    let mut hi = big_f.upper().clone();
    if let Some((a, b)) = f.support() {
        lo = lo.min(a);
        hi = hi.max(b);
    }
    let mut xs: Vec<Scalar> = vec![lo.clone(), hi.clone()];
    xs.extend(f.breakpoints().iter().cloned());
    xs.extend(big_f.breakpoints_in(&lo, &hi));
    xs.extend(big_f.breakpoints_in(&(&lo + s), &(&hi + s)).into_iter().map(|x| x - s));
    Ok(sorted_unique(xs)
        .iter()
        .all(|x| f.evaluate(x) == big_f.evaluate(&(x + s)) - big_f.evaluate(x)))
}

/// Checks `f = F(. + s) - F` for a compactly supported `F`.
pub fn verify_compact_identity(f: &PiecewiseLinearFn, s: &Scalar, big_f: &PiecewiseLinearFn) -> Result<bool> {
    check_period(s)?;
    let rhs = big_f.translate(&-s).sub(big_f);
    Ok(rhs == *f)
}
