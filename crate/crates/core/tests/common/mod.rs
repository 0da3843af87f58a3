#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tpe_core::{parse_function, FunctionDescriptor, Interval};

/// A catalog function and the box its random trust regions are drawn from.
pub struct Family {
    pub spec: &'static str,
    pub lo: f64,
    pub hi: f64,
    pub smooth: bool,
}

pub const FAMILIES: &[Family] = &[
    Family {
        spec: "exp",
        lo: -4.0,
        hi: 4.0,
        smooth: true,
    },
    Family {
        spec: "log",
        lo: 0.1,
        hi: 5.0,
        smooth: true,
    },
    Family {
        spec: "abs",
        lo: -3.0,
        hi: 3.0,
        smooth: false,
    },
    Family {
        spec: "sin",
        lo: -6.0,
        hi: 6.0,
        smooth: true,
    },
    Family {
        spec: "cos",
        lo: -6.0,
        hi: 6.0,
        smooth: true,
    },
    Family {
        spec: "softplus",
        lo: -6.0,
        hi: 6.0,
        smooth: true,
    },
    Family {
        spec: "relu",
        lo: -3.0,
        hi: 3.0,
        smooth: false,
    },
    Family {
        spec: "leaky_relu:0.1",
        lo: -3.0,
        hi: 3.0,
        smooth: false,
    },
    Family {
        spec: "gelu",
        lo: -4.0,
        hi: 4.0,
        smooth: true,
    },
    Family {
        spec: "silu",
        lo: -5.0,
        hi: 5.0,
        smooth: true,
    },
    Family {
        spec: "hard_silu",
        lo: -5.0,
        hi: 5.0,
        smooth: false,
    },
    Family {
        spec: "pow_c_x:0.5",
        lo: -3.0,
        hi: 3.0,
        smooth: true,
    },
    Family {
        spec: "pow_c_x:3",
        lo: -3.0,
        hi: 3.0,
        smooth: true,
    },
    Family {
        spec: "pow:3",
        lo: -2.0,
        hi: 2.0,
        smooth: true,
    },
    Family {
        spec: "pow:4",
        lo: -2.0,
        hi: 2.0,
        smooth: true,
    },
    Family {
        spec: "pow:-2",
        lo: 0.2,
        hi: 3.0,
        smooth: true,
    },
    Family {
        spec: "pow:0.5",
        lo: 0.05,
        hi: 4.0,
        smooth: true,
    },
    Family {
        spec: "lincomb:[(1.5,exp,3,0)]+poly:[0,0,-25]",
        lo: -1.0,
        hi: 1.5,
        smooth: true,
    },
    Family {
        spec: "lincomb:[(1,log,1,1)]",
        lo: -0.9,
        hi: 3.0,
        smooth: true,
    },
    Family {
        spec: "lincomb:[(0.5,sin,2,0.3),(1,softplus,1,0)]+poly:[1,-1]",
        lo: -3.0,
        hi: 3.0,
        smooth: true,
    },
];

pub fn function(spec: &str) -> FunctionDescriptor {
    parse_function(spec).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub struct Config {
    pub spec: &'static str,
    pub f: FunctionDescriptor,
    pub k: usize,
    pub x0: f64,
    pub region: Interval,
}

impl std::fmt::Debug for Config {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} k={} x0={} region={}",
            self.spec, self.k, self.x0, self.region
        )
    }
}

/// Random `(f, k, x0, region)` with `x0` at an endpoint one time in ten and
/// never on a kink of `f`.
pub fn random_config<R: Rng>(rng: &mut R, fam: &'static Family, k: usize) -> Config {
    let f = function(fam.spec);
    loop {
        let width = rng.gen_range(0.05..(fam.hi - fam.lo).min(4.0));
        let a = rng.gen_range(fam.lo..(fam.hi - width));
        let region = Interval::new(a, a + width).unwrap();
        let x0 = match rng.gen_range(0..10) {
            0 => region.lo(),
            1 => region.hi(),
            _ => rng.gen_range(region.lo()..region.hi()),
        };
        if f.kinks().iter().any(|&p| (p - x0).abs() < 1e-9) {
            continue;
        }
        return Config {
            spec: fam.spec,
            f,
            k,
            x0,
            region,
        };
    }
}

pub fn grid(region: &Interval, n: usize) -> impl Iterator<Item = f64> + '_ {
    (0..n).map(move |i| {
        if i + 1 == n {
            region.hi()
        } else {
            region.lo() + region.width() * (i as f64 / (n - 1) as f64)
        }
    })
}

/// `R_{j-1}(x; f', x0)` from closed-form derivatives.
pub fn derivative_remainder(f: &FunctionDescriptor, j: usize, x0: f64, x: f64) -> f64 {
    let mut t = 0.0;
    let mut fact = 1.0;
    for i in 0..j {
        if i > 0 {
            fact *= i as f64;
        }
        t += f.nth_derivative(i + 1, x0).unwrap() * (x - x0).powi(i as i32) / fact;
    }
    f.nth_derivative(1, x).unwrap() - t
}

/// Adaptive Simpson quadrature.
pub fn integrate<F: Fn(f64) -> f64>(g: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(g: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = g(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        g: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (lm, flm, left) = simpson(g, a, fa, m, fm);
        let (rm, frm, right) = simpson(g, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(g, a, fa, m, fm, left, lm, flm, tol / 2.0, depth - 1)
            + recurse(g, m, fm, b, fb, right, rm, frm, tol / 2.0, depth - 1)
    }
    let (fa, fb) = (g(a), g(b));
    let (m, fm, whole) = simpson(g, a, fa, b, fb);
    recurse(g, a, fa, b, fb, whole, m, fm, tol, 40)
}

/// A two-sided polynomial inequality `lower(x) <= f(x) <= upper(x)` whose
/// bounds should follow from one enclosure of `f`.
pub struct Inequality {
    pub label: &'static str,
    pub spec: &'static str,
    pub k: usize,
    pub x0: f64,
    pub region: (f64, f64),
    pub lower: Option<fn(f64) -> f64>,
    pub upper: Option<fn(f64) -> f64>,
}

/// Unbounded validity ranges are truncated at 20.
pub const CLASSIC_INEQUALITIES: &[Inequality] = &[
    Inequality {
        label: "1 - x ln 2 <= 2^-x <= 1 - x/2 on [0, 1]",
        spec: "pow_c_x:0.5",
        k: 1,
        x0: 0.0,
        region: (0.0, 1.0),
        lower: Some(|x| 1.0 - x * std::f64::consts::LN_2),
        upper: Some(|x| 1.0 - x / 2.0),
    },
    Inequality {
        label: "e^-x <= 1 - x/2 on [0, 1.59]",
        spec: "lincomb:[(1,exp,-1,0)]",
        k: 1,
        x0: 0.0,
        region: (0.0, 1.59),
        lower: None,
        upper: Some(|x| 1.0 - x / 2.0),
    },
    Inequality {
        label: "e^x <= 1 + x + x^2 on [-20, 1.79]",
        spec: "exp",
        k: 2,
        x0: 0.0,
        region: (-20.0, 1.79),
        lower: None,
        upper: Some(|x| 1.0 + x + x * x),
    },
    Inequality {
        label: "x - x^2/2 <= ln(1 + x) on [0, 20]",
        spec: "lincomb:[(1,log,1,1)]",
        k: 2,
        x0: 0.0,
        region: (0.0, 20.0),
        lower: Some(|x| x - x * x / 2.0),
        upper: None,
    },
    Inequality {
        label: "x - x^2 <= ln(1 + x) on [-0.68, 20]",
        spec: "lincomb:[(1,log,1,1)]",
        k: 2,
        x0: 0.0,
        region: (-0.68, 20.0),
        lower: Some(|x| x - x * x),
        upper: None,
    },
    Inequality {
        label: "(x+1)/2 - (x-1)^2/2 <= sqrt(x) <= (x+1)/2 - (x-1)^2/8 on [0, 1]",
        spec: "pow:0.5",
        k: 2,
        x0: 1.0,
        region: (0.0, 1.0),
        lower: Some(|x| (x + 1.0) / 2.0 - (x - 1.0).powi(2) / 2.0),
        upper: Some(|x| (x + 1.0) / 2.0 - (x - 1.0).powi(2) / 8.0),
    },
];

fn e2_quarter(x: f64) -> f64 {
    let e2 = std::f64::consts::E * std::f64::consts::E;
    1.0 + x + (e2 - 3.0) / 4.0 * x * x
}

/// `1 + x + x^2/2 <= exp(1 + x) <= 1 + x + (e^2 - 3)/4 x^2` read literally on [-1, 1].
pub const SHIFTED_EXP_LITERAL: Inequality = Inequality {
    label: "1 + x + x^2/2 <= exp(1 + x) <= 1 + x + (e^2-3)/4 x^2 on [-1, 1]",
    spec: "lincomb:[(1,exp,1,1)]",
    k: 2,
    x0: 0.0,
    region: (-1.0, 1.0),
    lower: Some(|x| 1.0 + x + x * x / 2.0),
    upper: Some(e2_quarter),
};

/// The same bounds for `exp(y)` with `y = 1 + x` in [0, 2].
pub const SHIFTED_EXP_AS_EXP: Inequality = Inequality {
    label: "1 + y + y^2/2 <= exp(y) <= 1 + y + (e^2-3)/4 y^2 on [0, 2]",
    spec: "exp",
    k: 2,
    x0: 0.0,
    region: (0.0, 2.0),
    lower: Some(|x| 1.0 + x + x * x / 2.0),
    upper: Some(e2_quarter),
};

fn up4(x: f64) -> f64 {
    Interval::point(x)
        .inflate_ulps(tpe_core::VALIDITY_ULPS)
        .hi()
}

fn down4(x: f64) -> f64 {
    Interval::point(x)
        .inflate_ulps(tpe_core::VALIDITY_ULPS)
        .lo()
}

/// Grid points (1000 of them) where the inequality or the enclosure behind it fails.
///
/// At each point the enclosure must contain `f`, and its nominal bounds must
/// sit between the stated lower and upper curves, all up to 4 ulps.
pub fn inequality_violations(q: &Inequality) -> tpe_core::Result<Vec<f64>> {
    let f = function(q.spec);
    let region = Interval::new(q.region.0, q.region.1)?;
    let report = tpe_core::enclose(&f, q.k, q.x0, &region)?;
    let e = &report.enclosure;
    let mut bad = Vec::new();
    for x in grid(&region, 1000) {
        let fx = f.eval(x);
        let valid = tpe_core::eval_enclosure(e, x)?
            .inflate_ulps(tpe_core::VALIDITY_ULPS)
            .inflate_abs(f.eval_error(x) + f.eval_error(q.x0))
            .contains(fx);
        let nominal = e.nominal(x)?;
        let lower_ok = q
            .lower
            .is_none_or(|l| down4(l(x)) <= up4(nominal.lo()) && down4(l(x)) <= up4(fx));
        let upper_ok = q
            .upper
            .is_none_or(|u| down4(nominal.hi()) <= up4(u(x)) && down4(fx) <= up4(u(x)));
        if !(valid && lower_ok && upper_ok) {
            bad.push(x);
        }
    }
    Ok(bad)
}
