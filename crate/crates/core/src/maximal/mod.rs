//! Discretized grand maximal operators: the local operator with the
//! Gaussian time restriction t < min(1, 1/|x|) and the classical one.

mod dictionary;
mod sweep;

pub use dictionary::{Dictionary, DictionarySummary, Profile, Profile1D};
pub use sweep::{
    classical_grand_maximal, convolve, local_grand_maximal, EvalGrid, MaximalOptions, MaximalProfile,
};

use crate::error::Result;
use crate::func_repr::Func;

/// ‖M̂_loc f‖_{L¹(γ)} with the standard dictionary on the adaptive grid
/// around the support (`per_unit` points per local radius).
pub fn local_maximal_norm(f: &Func, per_unit: usize, p: f64) -> Result<f64> {
    let Some(grid) = EvalGrid::for_local(f, per_unit)? else { return Ok(0.0) };
    let dict = Dictionary::standard(f.dim())?;
    let prof = local_grand_maximal(f, &grid, &dict, &MaximalOptions::default())?;
    Ok(if p == 1.0 { prof.l1_gauss() } else { prof.lp_gauss(p) })
}
