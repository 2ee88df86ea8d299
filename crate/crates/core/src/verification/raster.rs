//! Plain-text porosity rasters.
//!
//! Format: first line `NX NY`, then `NX * NY` whitespace-separated values in
//! row-major order on the cell grid of the unit square, rows running from
//! `y = 0` upwards.

use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct PorosityRaster {
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<f64>,
}

impl PorosityRaster {
    pub fn parse(text: &str) -> Result<Self> {
        let mut tokens = text.split_whitespace();
        let mut dim = |what: &str| -> Result<usize> {
            tokens
                .next()
                .ok_or_else(|| Error::Raster(format!("missing {what}")))?
                .parse::<usize>()
                .map_err(|e| Error::Raster(format!("bad {what}: {e}")))
        };
        let nx = dim("NX")?;
        let ny = dim("NY")?;
        if nx == 0 || ny == 0 {
            return Err(Error::Raster("empty grid".into()));
        }
        let values = tokens
            .map(|t| t.parse::<f64>().map_err(|e| Error::Raster(format!("bad value '{t}': {e}"))))
            .collect::<Result<Vec<_>>>()?;
        if values.len() != nx * ny {
            return Err(Error::Raster(format!("expected {} values, found {}", nx * ny, values.len())));
        }
        Ok(Self { nx, ny, values })
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.nx, self.ny);
        for row in self.values.chunks(self.nx) {
            let line: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
            let _ = writeln!(s, "{}", line.join(" "));
        }
        s
    }

    /// Every value must lie in `[0, cutoff)`.
    pub fn validate(&self, cutoff: f64) -> Result<()> {
        match self.values.iter().position(|&v| !(0.0..cutoff).contains(&v)) {
            None => Ok(()),
            Some(k) => Err(Error::Raster(format!(
                "porosity {} at cell ({}, {}) outside [0, {cutoff})",
                self.values[k],
                k % self.nx,
                k / self.nx
            ))),
        }
    }

    /// Value of the cell containing `(x, y)` in the unit square.
    pub fn at(&self, x: f64, y: f64) -> f64 {
        let i = ((x * self.nx as f64).floor().max(0.0) as usize).min(self.nx - 1);
        let j = ((y * self.ny as f64).floor().max(0.0) as usize).min(self.ny - 1);
        self.values[j * self.nx + i]
    }

    /// Deterministic layered field with random smooth perturbations, in `[0.02, 0.4]`.
    pub fn synthetic(nx: usize, ny: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let modes: Vec<(f64, f64, f64, f64)> = (0..12)
            .map(|_| {
                (
                    rng.random_range(1.0..8.0),
                    rng.random_range(1.0..8.0),
                    rng.random_range(0.0..std::f64::consts::TAU),
                    rng.random_range(0.3..1.0),
                )
            })
            .collect();
        let layers: Vec<f64> = (0..ny.div_ceil(8).max(1)).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut raw = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let (x, y) = ((i as f64 + 0.5) / nx as f64, (j as f64 + 0.5) / ny as f64);
                let mut v = 1.5 * layers[(j * layers.len()) / ny];
                for &(kx, ky, ph, a) in &modes {
                    v += a * (kx * x * std::f64::consts::PI + ky * y * std::f64::consts::PI + ph).sin() / modes.len() as f64 * 3.0;
                }
                v += 0.3 * rng.random_range(-1.0..1.0);
                raw.push(v);
            }
        }
        let lo = raw.iter().cloned().fold(f64::MAX, f64::min);
        let hi = raw.iter().cloned().fold(f64::MIN, f64::max);
        let values = raw.iter().map(|v| 0.02 + 0.38 * (v - lo) / (hi - lo).max(1e-300)).collect();
        Self { nx, ny, values }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let r = PorosityRaster::synthetic(6, 4, 3);
        assert_eq!(PorosityRaster::parse(&r.to_text()).unwrap(), r);
    }

    #[test]
    fn synthetic_range_and_determinism() {
        let a = PorosityRaster::synthetic(128, 128, 7);
        assert_eq!(a, PorosityRaster::synthetic(128, 128, 7));
        assert!(a.values.iter().all(|&v| (0.02..=0.4 + 1e-12).contains(&v)));
        a.validate(0.5).unwrap();
    }

    #[test]
    fn rejects_bad_input() {
        assert!(PorosityRaster::parse("2 2\n0.1 0.2 0.3").is_err());
        assert!(PorosityRaster::parse("x 2\n").is_err());
        let r = PorosityRaster::parse("2 1\n0.1 0.5").unwrap();
        assert!(matches!(r.validate(0.5), Err(Error::Raster(_))));
        let r = PorosityRaster::parse("1 1\n-0.1").unwrap();
        assert!(r.validate(0.5).is_err());
    }

    #[test]
    fn lookup_uses_bottom_row_first() {
        let r = PorosityRaster::parse("2 2\n0.1 0.2\n0.3 0.4").unwrap();
        assert_eq!(r.at(0.25, 0.25), 0.1);
        assert_eq!(r.at(0.75, 0.25), 0.2);
        assert_eq!(r.at(0.25, 0.75), 0.3);
        assert_eq!(r.at(1.0, 1.0), 0.4);
    }
}
