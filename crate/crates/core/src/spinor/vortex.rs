use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{SpinorError, SpinorFieldSample};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Vortex {
    /// Lower-left corner of the plaquette.
    pub x: usize,
    pub y: usize,
    pub charge: i32,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct VortexScan {
    pub vortices: Vec<Vortex>,
    /// Plaquettes skipped because a corner has `psi = 0`.
    pub skipped: usize,
}

impl VortexScan {
    pub fn net_charge(&self) -> i64 {
        self.vortices.iter().map(|v| v.charge as i64).sum()
    }
}

/// Wraps a phase difference into `(-pi, pi]`.
pub(crate) fn wrap(d: f64) -> f64 {
    let mut d = d % (2.0 * PI);
    if d > PI {
        d -= 2.0 * PI;
    } else if d <= -PI {
        d += 2.0 * PI;
    }
    d
}

/// Wrapped phase differences along the horizontal edge `(x,y)->(x+1,y)` and
/// the vertical edge `(x,y)->(x,y+1)`; `NaN` marks an edge touching a zero.
pub(crate) struct Edges {
    l: usize,
    h: Vec<f64>,
    v: Vec<f64>,
}

impl Edges {
    pub(crate) fn new(f: &SpinorFieldSample) -> Self {
        let l = f.l;
        let phase: Vec<f64> = f
            .psi
            .iter()
            .map(|z| if z.re == 0.0 && z.im == 0.0 { f64::NAN } else { z.arg() })
            .collect();
        let mut h = vec![0.0; l * l];
        let mut v = vec![0.0; l * l];
        for y in 0..l {
            for x in 0..l {
                let here = phase[y * l + x];
                h[y * l + x] = wrap(phase[y * l + (x + 1) % l] - here);
                v[y * l + x] = wrap(phase[((y + 1) % l) * l + x] - here);
            }
        }
        Self { l, h, v }
    }

    pub(crate) fn h(&self, x: usize, y: usize) -> f64 {
        self.h[(y % self.l) * self.l + x % self.l]
    }

    pub(crate) fn v(&self, x: usize, y: usize) -> f64 {
        self.v[(y % self.l) * self.l + x % self.l]
    }

    /// Counter-clockwise circulation around plaquette `(x, y)`.
    pub(crate) fn circulation(&self, x: usize, y: usize) -> f64 {
        self.h(x, y) + self.v(x + 1, y) - self.h(x, y + 1) - self.v(x, y)
    }

    pub(crate) fn charge(&self, x: usize, y: usize) -> Option<i32> {
        let c = self.circulation(x, y);
        c.is_finite().then(|| (c / (2.0 * PI)).round() as i32)
    }
}

/// Every plaquette with nonzero winding.
pub fn detect_vortices(f: &SpinorFieldSample) -> VortexScan {
    let edges = Edges::new(f);
    let mut scan = VortexScan::default();
    for y in 0..f.l {
        for x in 0..f.l {
            match edges.charge(x, y) {
                Some(0) => {}
                Some(charge) => scan.vortices.push(Vortex { x, y, charge }),
                None => scan.skipped += 1,
            }
        }
    }
    scan
}

/// Plaquettes whose centers `(x + 1/2, y + 1/2)` lie within `r` of `center`
/// (minimum-image distance), as a membership mask.
pub(crate) fn disc_mask(l: usize, center: (f64, f64), r: f64) -> Vec<bool> {
    let lf = l as f64;
    let min_image = |d: f64| {
        let d = d.rem_euclid(lf);
        d.min(lf - d)
    };
    let mut mask = vec![false; l * l];
    for y in 0..l {
        for x in 0..l {
            let dx = min_image(x as f64 + 0.5 - center.0);
            let dy = min_image(y as f64 + 0.5 - center.1);
            mask[y * l + x] = dx * dx + dy * dy <= r * r;
        }
    }
    mask
}

fn check_radius(f: &SpinorFieldSample, r: f64) -> Result<(), SpinorError> {
    let max = f.l as f64 / 2.0;
    if r > max || !(r >= 0.0) {
        Err(SpinorError::RadiusTooLarge { r, max })
    } else {
        Ok(())
    }
}

/// Net vortex charge of the plaquettes inside the disc of radius `r`
/// (lattice units).
pub fn winding_number(f: &SpinorFieldSample, center: (f64, f64), r: f64) -> Result<i64, SpinorError> {
    check_radius(f, r)?;
    let edges = Edges::new(f);
    let mask = disc_mask(f.l, center, r);
    winding_from(&edges, &mask, f.l)
}

pub(crate) fn winding_from(edges: &Edges, mask: &[bool], l: usize) -> Result<i64, SpinorError> {
    let mut total = 0i64;
    let mut zeros = 0;
    for y in 0..l {
        for x in 0..l {
            if mask[y * l + x] {
                match edges.charge(x, y) {
                    Some(c) => total += c as i64,
                    None => zeros += 1,
                }
            }
        }
    }
    if zeros > 0 {
        return Err(SpinorError::ZeroField { count: zeros });
    }
    Ok(total)
}

/// Wrapped-phase circulation around the boundary of the same plaquette disc
/// as [`winding_number`], divided by `2 pi`.
pub fn boundary_winding(f: &SpinorFieldSample, center: (f64, f64), r: f64) -> Result<i64, SpinorError> {
    check_radius(f, r)?;
    let edges = Edges::new(f);
    let mask = disc_mask(f.l, center, r);
    boundary_from(&edges, &mask, f.l)
}

pub(crate) fn boundary_from(edges: &Edges, mask: &[bool], l: usize) -> Result<i64, SpinorError> {
    let inside = |x: usize, y: usize| mask[(y % l) * l + x % l];
    let mut circ = 0.0;
    for y in 0..l {
        for x in 0..l {
            if !inside(x, y) {
                continue;
            }
            // bottom, right, top, left edges of plaquette (x, y), counter-clockwise
            if !inside(x, y + l - 1) {
                circ += edges.h(x, y);
            }
            if !inside(x + 1, y) {
                circ += edges.v(x + 1, y);
            }
            if !inside(x, y + 1) {
                circ -= edges.h(x, y + 1);
            }
            if !inside(x + l - 1, y) {
                circ -= edges.v(x, y);
            }
        }
    }
    if !circ.is_finite() {
        return Err(SpinorError::ZeroField { count: 1 });
    }
    Ok((circ / (2.0 * PI)).round() as i64)
}
