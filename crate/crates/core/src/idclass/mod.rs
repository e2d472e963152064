//! Infinite divisibility: Lévy triplets, the Bercovici–Pata maps, free
//! regularity tests and ⊞-power scans.

mod checks;
mod levy;
mod scan;

pub use checks::{
    boolean_free_power_sides, bp_boolean, cfp, cfp_levy, cfp_seq, kurtosis_check, lem345_check, main3_factor,
    main3_sides, prop345_check, thm110_check, CompoundPoisson, Kurtosis, KurtosisVerdict, Lem345, Prop345,
    Thm110Condition, Thm110Report, DYADIC_LEVELS, SYMMETRY_TOL,
};
pub use levy::{
    lambda_inv, lambda_map, levy_meixner, regular_drift, to_regular_form, triplet_cumulants, truncated_drift,
    ClassicalTriplet, FreeTriplet, LevyGrid, LevyMeasure, Meixner, MeixnerReport, RegularForm, VoiculescuPair,
};
pub use scan::{
    left_edge, positivity_scan, power_cauchy, power_density, shift_nonregular_witness, ScanPoint, ScanReport,
    ShiftWitness, WitnessSide, EDGE_TOL, WITNESS_TS,
};
