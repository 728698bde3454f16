use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::CavityModel;
use crate::series::SpatialProfile;

/// Excess intensity of the coupled two-excitation field over the sum of the
/// uncoupled references, split at the atom.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntensityDifferences {
    pub left: f64,
    pub right: f64,
    /// `|left| + right`
    pub total: f64,
}

fn same_grid(a: &SpatialProfile, b: &SpatialProfile) -> Result<()> {
    if a.positions != b.positions {
        return Err(Error::GridMismatch("profiles are sampled on different grids".into()));
    }
    if a.mode != b.mode {
        return Err(Error::GridMismatch(format!("intensity modes differ ({:?} vs {:?})", a.mode, b.mode)));
    }
    if a.time != b.time {
        return Err(Error::GridMismatch(format!(
            "profiles taken at different times ({} vs {})",
            a.time, b.time
        )));
    }
    Ok(())
}

/// Trapezoid integrals of `values` over `z < split` and `z > split`.
///
/// The segment containing `split` is cut there with a linearly interpolated value.
fn split_trapezoid(z: &[f64], v: &[f64], split: f64) -> (f64, f64) {
    let (mut lo, mut hi) = (0.0, 0.0);
    for i in 1..z.len() {
        let (z0, z1, v0, v1) = (z[i - 1], z[i], v[i - 1], v[i]);
        if z1 <= split {
            lo += 0.5 * (z1 - z0) * (v0 + v1);
        } else if z0 >= split {
            hi += 0.5 * (z1 - z0) * (v0 + v1);
        } else {
            let vm = v0 + (v1 - v0) * (split - z0) / (z1 - z0);
            lo += 0.5 * (split - z0) * (v0 + vm);
            hi += 0.5 * (z1 - split) * (vm + v1);
        }
    }
    (lo, hi)
}

/// `Delta I_left/right = int (I3 - I2 - I1) dz` over each half of the cavity.
pub fn intensity_differences(
    model: &CavityModel,
    i1: &SpatialProfile,
    i2: &SpatialProfile,
    i3: &SpatialProfile,
) -> Result<IntensityDifferences> {
    same_grid(i3, i2)?;
    same_grid(i3, i1)?;
    let excess: Vec<f64> =
        i3.values.iter().zip(&i2.values).zip(&i1.values).map(|((a, b), c)| a - b - c).collect();
    let (left, right) = split_trapezoid(&i3.positions, &excess, model.atom_position());
    Ok(IntensityDifferences { left, right, total: left.abs() + right })
}

/// The photon added by stimulated emission, isolated on the right half.
#[derive(Clone, Debug, PartialEq)]
pub struct InducedPacket {
    /// `I3(z) - I3(L - z) - I1(z)` for `z >= L/2`.
    pub profile: SpatialProfile,
    pub integral: f64,
    /// Centre of mass of the induced packet.
    pub center: f64,
    /// Centre of mass of the stimulating packet `I1` on the same half.
    pub stimulus_center: f64,
}

fn center_of_mass(z: &[f64], v: &[f64]) -> f64 {
    let (mut m0, mut m1) = (0.0, 0.0);
    for i in 1..z.len() {
        let h = z[i] - z[i - 1];
        m0 += 0.5 * h * (v[i - 1] + v[i]);
        m1 += 0.5 * h * (z[i - 1] * v[i - 1] + z[i] * v[i]);
    }
    m1 / m0
}

/// Mirrors the left half of `i3` onto the right and subtracts it and `i1`.
///
/// The mirrored left half stands in for the spontaneously emitted photon,
/// which the atom at the cavity centre sends symmetrically in both directions.
pub fn induced_packet(
    model: &CavityModel,
    i3: &SpatialProfile,
    i1: &SpatialProfile,
) -> Result<InducedPacket> {
    same_grid(i3, i1)?;
    let l = model.length();
    let centre = 0.5 * l;
    if (model.atom_position() - centre).abs() > 1e-9 * l {
        return Err(Error::AtomNotCentred { atom: model.atom_position(), centre });
    }
    let mut z = Vec::new();
    let mut v = Vec::new();
    let mut stim = Vec::new();
    for (k, &zk) in i3.positions.iter().enumerate() {
        if zk < centre {
            continue;
        }
        z.push(zk);
        v.push(i3.values[k] - i3.at(l - zk) - i1.values[k]);
        stim.push(i1.values[k]);
    }
    let profile = SpatialProfile::new(z, v, i3.time, i3.mode);
    let integral = profile.integral();
    let center = center_of_mass(&profile.positions, &profile.values);
    let stimulus_center = center_of_mass(&profile.positions, &stim);
    Ok(InducedPacket { profile, integral, center, stimulus_center })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_trapezoid_is_exact_for_linear_data() {
        let z = [0.0, 1.0, 2.0, 3.0];
        let v = [0.0, 1.0, 2.0, 3.0];
        let (lo, hi) = split_trapezoid(&z, &v, 1.5);
        assert!((lo - 1.125).abs() < 1e-15);
        assert!((hi - 3.375).abs() < 1e-15);
    }

    #[test]
    fn centre_of_mass_of_symmetric_bump() {
        let z: Vec<f64> = (0..101).map(|i| i as f64 * 0.1).collect();
        let v: Vec<f64> = z.iter().map(|x| (-(x - 6.0) * (x - 6.0)).exp()).collect();
        assert!((center_of_mass(&z, &v) - 6.0).abs() < 1e-6);
    }
}
