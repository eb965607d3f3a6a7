//! Model files shipped with the crate, as JSON text.

macro_rules! fixture {
    ($(#[$doc:meta])* $name:ident, $file:literal) => {
        $(#[$doc])*
        pub const $name: &str = include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/", $file));
    };
}

fixture!(
    /// Two states, possession S1 ↦ {E, U}, S2 ↦ {F, U}, with its Boolean lattice.
    CM_TWO_STATE, "cm_two_state.json"
);
fixture!(
    /// Universe weights summing to 9/10.
    MASS_POINT_NINE, "mass_point_nine.json"
);
fixture!(
    /// A procedure naming an undeclared property.
    UNKNOWN_PROPERTY, "unknown_property.json"
);
fixture!(
    /// Band model, 10⁴ segments, states at θ = 0, π/3, π/2, π.
    BAND_QUBIT, "band_qubit.json"
);
fixture!(
    /// One procedure over two contexts whose mean conditionals break Bayes.
    BAYES_TWO_CONTEXT, "bayes_two_context.json"
);
fixture!(
    /// Catalog {E, F}, {F, G}.
    CHAINED_COMPATIBILITY, "chained_compatibility.json"
);
fixture!(
    /// MO2 with a measure that is not additive on {a, a_perp}.
    MO2_MEASURE, "mo2_measure.json"
);
fixture!(
    /// Qubit projectors O, P0, P1, P+, P−, I and states I/2, |0⟩, |+⟩.
    QUBIT_CONDITIONING, "qubit_conditioning.json"
);

/// Every fixture with its file name.
pub const ALL: &[(&str, &str)] = &[
    ("cm_two_state.json", CM_TWO_STATE),
    ("mass_point_nine.json", MASS_POINT_NINE),
    ("unknown_property.json", UNKNOWN_PROPERTY),
    ("band_qubit.json", BAND_QUBIT),
    ("bayes_two_context.json", BAYES_TWO_CONTEXT),
    ("chained_compatibility.json", CHAINED_COMPATIBILITY),
    ("mo2_measure.json", MO2_MEASURE),
    ("qubit_conditioning.json", QUBIT_CONDITIONING),
];
