use std::f64::consts::LN_2;

use rand::Rng;

use crate::error::{check_dim, Error, Result};
use crate::rng::SeedKey;

/// Gain ranges and noise floor used to draw a random power-control game.
#[derive(Clone, Debug, PartialEq)]
pub struct GameSpec {
    pub players: usize,
    pub channels: usize,
    pub direct_range: (f64, f64),
    pub cross_range: (f64, f64),
    pub noise_floor: f64,
}

impl Default for GameSpec {
    fn default() -> Self {
        GameSpec {
            players: 12,
            channels: 4,
            direct_range: (0.8, 1.2),
            cross_range: (0.01, 0.05),
            noise_floor: 1.0,
        }
    }
}

/// Multi-channel power control game. Player `n` picks powers `x^(n,·)` on
/// `D` channels with `x ≥ 0`, `Σ_d x^(n,d) ≤ 1`, and earns
/// `Σ_d log₂(1 + g_nn^(d) x^(n,d) / (N0 + I_n^(d)(x)))`.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerControlGame {
    players: usize,
    channels: usize,
    /// `direct[n*D + d] = g_{n,n}^(d)`.
    direct: Vec<f64>,
    /// `cross[(m*N + n)*D + d] = g_{m,n}^(d)`, gain from transmitter `m` to
    /// receiver `n`. Diagonal entries are ignored.
    cross: Vec<f64>,
    noise_floor: f64,
}

impl PowerControlGame {
    pub fn new(
        players: usize,
        channels: usize,
        direct: Vec<f64>,
        cross: Vec<f64>,
        noise_floor: f64,
    ) -> Result<Self> {
        if players == 0 || channels == 0 {
            return Err(Error::InvalidParameter(
                "game needs at least one player and one channel".into(),
            ));
        }
        check_dim(players * channels, direct.len())?;
        check_dim(players * players * channels, cross.len())?;
        if !(noise_floor > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "noise floor must be positive (got {noise_floor})"
            )));
        }
        if direct.iter().chain(&cross).any(|g| !(*g >= 0.0)) {
            return Err(Error::InvalidParameter("channel gains must be nonnegative".into()));
        }
        Ok(PowerControlGame {
            players,
            channels,
            direct,
            cross,
            noise_floor,
        })
    }

    /// Gains drawn uniformly from the spec's ranges.
    pub fn random(spec: &GameSpec, key: SeedKey) -> Result<Self> {
        let mut rng = key.rng();
        let (n, d) = (spec.players, spec.channels);
        let direct = (0..n * d)
            .map(|_| rng.random_range(spec.direct_range.0..=spec.direct_range.1))
            .collect();
        let mut cross = vec![0.0; n * n * d];
        for m in 0..n {
            for k in 0..n {
                for c in 0..d {
                    if m != k {
                        cross[(m * n + k) * d + c] =
                            rng.random_range(spec.cross_range.0..=spec.cross_range.1);
                    }
                }
            }
        }
        PowerControlGame::new(n, d, direct, cross, spec.noise_floor)
    }

    pub fn players(&self) -> usize {
        self.players
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn dim(&self) -> usize {
        self.players * self.channels
    }

    pub fn direct_gains(&self) -> &[f64] {
        &self.direct
    }

    pub fn cross_gains(&self) -> &[f64] {
        &self.cross
    }

    pub fn noise_floor(&self) -> f64 {
        self.noise_floor
    }

    fn interference(&self, x: &[f64], n: usize, c: usize) -> f64 {
        let (np, d) = (self.players, self.channels);
        (0..np)
            .filter(|&m| m != n)
            .map(|m| self.cross[(m * np + n) * d + c] * x[m * d + c])
            .sum()
    }

    /// Utility of player `n`.
    pub fn utility(&self, x: &[f64], n: usize) -> f64 {
        let d = self.channels;
        (0..d)
            .map(|c| {
                let g = self.direct[n * d + c];
                let sinr = g * x[n * d + c] / (self.noise_floor + self.interference(x, n, c));
                (1.0 + sinr).log2()
            })
            .sum()
    }

    /// Writes H(x); components whose SINR denominator is not positive become NaN.
    pub(crate) fn pseudogradient_into(&self, x: &[f64], out: &mut [f64]) {
        let d = self.channels;
        for n in 0..self.players {
            for c in 0..d {
                let g = self.direct[n * d + c];
                let denom = self.noise_floor + self.interference(x, n, c) + g * x[n * d + c];
                out[n * d + c] = if denom > 0.0 { g / (LN_2 * denom) } else { f64::NAN };
            }
        }
    }
}

/// Stacked own-action utility gradients
/// `H(x)_(n,d) = g_nn^(d) / (ln 2 · (N0 + I_n^(d)(x) + g_nn^(d) x^(n,d)))`.
pub fn game_pseudogradient(game: &PowerControlGame, x: &[f64]) -> Result<Vec<f64>> {
    check_dim(game.dim(), x.len())?;
    let d = game.channels;
    for n in 0..game.players {
        for c in 0..d {
            let denom = game.noise_floor
                + game.interference(x, n, c)
                + game.direct[n * d + c] * x[n * d + c];
            if !(denom > 0.0) {
                return Err(Error::NegativeSinr {
                    player: n,
                    channel: c,
                });
            }
        }
    }
    let mut out = vec![0.0; game.dim()];
    game.pseudogradient_into(x, &mut out);
    Ok(out)
}
