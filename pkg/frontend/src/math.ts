// Double-precision special functions for the three links.  The browser
// only needs these so slider drags keep working when the backend is
// unreachable; the backend stays the authority and the shared vector
// file pins the agreement to 1e-9.

// Rational Chebyshev approximation of erf/erfc (W. J. Cody's CALERF
// scheme, relative error ~1e-16 across all three branches).

const ERF_A = [
  3.1611237438705656, 113.864154151050156, 377.485237685302021,
  3209.37758913846947, 0.185777706184603153,
];
const ERF_B = [
  23.6012909523441209, 244.024637934444173, 1282.61652607737228,
  2844.23683343917062,
];
const ERF_C = [
  0.564188496988670089, 8.88314979438837594, 66.1191906371416295,
  298.635138197400131, 881.95222124176909, 1712.04761263407058,
  2051.07837782607147, 1230.33935479799725, 2.15311535474403846e-8,
];
const ERF_D = [
  15.7449261107098347, 117.693950891312499, 537.181101862009858,
  1621.38957456669019, 3290.79923573345963, 4362.61909014324716,
  3439.36767414372164, 1230.33935480374942,
];
const ERF_P = [
  0.305326634961232344, 0.360344899949804439, 0.125781726111229246,
  0.0160837851487422766, 6.58749161529837803e-4, 0.0163153871373020978,
];
const ERF_Q = [
  2.56852019228982242, 1.87295284992346047, 0.527905102951428412,
  0.0605183413124413191, 2.33520497626869185e-3,
];
const SQRPI = 0.5641895835477562869;

// exp(-y*y) split so the large-argument branches keep full precision
function expNegSq(y: number): number {
  const ysq = Math.trunc(y * 16) / 16;
  const del = (y - ysq) * (y + ysq);
  return Math.exp(-ysq * ysq) * Math.exp(-del);
}

export function erf(x: number): number {
  const y = Math.abs(x);
  if (y <= 0.46875) {
    const z = y > 1.11e-16 ? y * y : 0;
    let num = ERF_A[4] * z;
    let den = z;
    for (let i = 0; i < 3; i++) {
      num = (num + ERF_A[i]) * z;
      den = (den + ERF_B[i]) * z;
    }
    return (x * (num + ERF_A[3])) / (den + ERF_B[3]);
  }
  return x > 0 ? 1 - erfc(y) : erfc(y) - 1;
}

export function erfc(x: number): number {
  const y = Math.abs(x);
  if (y <= 0.46875) return 1 - erf(x);
  let result: number;
  if (y <= 4) {
    let num = ERF_C[8] * y;
    let den = y;
    for (let i = 0; i < 7; i++) {
      num = (num + ERF_C[i]) * y;
      den = (den + ERF_D[i]) * y;
    }
    result = expNegSq(y) * ((num + ERF_C[7]) / (den + ERF_D[7]));
  } else if (y < 26.543) {
    const z = 1 / (y * y);
    let num = ERF_P[5] * z;
    let den = z;
    for (let i = 0; i < 4; i++) {
      num = (num + ERF_P[i]) * z;
      den = (den + ERF_Q[i]) * z;
    }
    const tail = (z * (num + ERF_P[4])) / (den + ERF_Q[4]);
    result = (expNegSq(y) * (SQRPI - tail)) / y;
  } else {
    result = 0;
  }
  return x < 0 ? 2 - result : result;
}

// Inverse normal cdf, Wichura's PPND16 rational approximations
// (absolute error below 1e-15 over the open unit interval).
export function normalQuantile(p: number): number {
  if (!(p > 0 && p < 1)) {
    if (p === 0) return -Infinity;
    if (p === 1) return Infinity;
    return NaN;
  }
  const q = p - 0.5;
  if (Math.abs(q) <= 0.425) {
    const r = 0.180625 - q * q;
    const num =
      (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
        6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
        1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
        1.3314166789178437745e2) * r + 3.387132872796366608);
    const den =
      (((((((5.226495278852854561e3 * r + 2.8729085735721942674e4) * r +
        3.930789580009271061e4) * r + 2.1213794301586595867e4) * r +
        5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
        4.2313330701600911252e1) * r + 1.0);
    return (q * num) / den;
  }
  let r = q < 0 ? p : 1 - p;
  r = Math.sqrt(-Math.log(r));
  let val: number;
  if (r <= 5) {
    r -= 1.6;
    const num =
      (((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r +
        0.24178072517745061177) * r + 1.27045825245236838258) * r +
        3.64784832476320460504) * r + 5.7694972214606914055) * r +
        4.6303378461565452959) * r + 1.42343711074968357734);
    const den =
      (((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r +
        0.0151986665636164571966) * r + 0.14810397642748007459) * r +
        0.68976733498510000455) * r + 1.6763848301838038494) * r +
        2.05319162663775882187) * r + 1.0);
    val = num / den;
  } else {
    r -= 5;
    const num =
      (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
        0.0012426609473880784386) * r + 0.026532189526576123093) * r +
        0.29656057182850489123) * r + 1.7848265399172913358) * r +
        5.4637849111641143699) * r + 6.6579046435011037772);
    const den =
      (((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r +
        1.8463183175100546818e-5) * r + 7.868691311456132591e-4) * r +
        0.0148753612908506148525) * r + 0.13692988092273580531) * r +
        0.59983220655588793769) * r + 1.0);
    val = num / den;
  }
  return q < 0 ? -val : val;
}

export type LinkName = "probit" | "logit" | "cloglog";

export interface LinkFns {
  cdf(x: number): number;
  quantile(p: number): number;
  pdf(x: number): number;
}

const SQRT2 = Math.SQRT2;
const INV_SQRT_2PI = 0.3989422804014327;

export const LINKS: Record<LinkName, LinkFns> = {
  probit: {
    cdf: (x) => 0.5 * erfc(-x / SQRT2),
    quantile: normalQuantile,
    pdf: (x) => INV_SQRT_2PI * Math.exp(-0.5 * x * x),
  },
  logit: {
    cdf: (x) => {
      if (x >= 0) return 1 / (1 + Math.exp(-x));
      const e = Math.exp(x);
      return e / (1 + e);
    },
    quantile: (p) => Math.log(p) - Math.log1p(-p),
    pdf: (x) => {
      const e = Math.exp(-Math.abs(x));
      const d = 1 + e;
      return e / (d * d);
    },
  },
  cloglog: {
    // minimum extreme value form: cdf runs 0 -> 1 steeply on the right
    cdf: (x) => -Math.expm1(-Math.exp(x)),
    quantile: (p) => Math.log(-Math.log1p(-p)),
    pdf: (x) => Math.exp(x - Math.exp(x)),
  },
};

export const LINK_NAMES: LinkName[] = ["probit", "logit", "cloglog"];
