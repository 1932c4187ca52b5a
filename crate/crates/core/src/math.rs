//! Scalar float helpers routed through `std` or `libm`, so the crate builds
//! with `no_std`.

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("slipgait-core needs either the `std` feature or the `libm` feature");

macro_rules! float_fn {
    ($($name:ident => $libm_name:ident),* $(,)?) => {
        $(
            #[cfg(feature = "std")]
            #[inline(always)]
            pub(crate) fn $name(x: f64) -> f64 {
                f64::$name(x)
            }

            #[cfg(not(feature = "std"))]
            #[inline(always)]
            pub(crate) fn $name(x: f64) -> f64 {
                libm::$libm_name(x)
            }
        )*
    };
}

float_fn! {
    sqrt => sqrt,
    sin => sin,
    cos => cos,
    exp => exp,
    floor => floor,
}

/// Round-half-up for the non-negative values used in split sizing.
#[inline(always)]
pub(crate) fn round_half_up(x: f64) -> f64 {
    floor(x + 0.5)
}

/// SplitMix64 finalizer; the 64-bit mixing function behind every derived
/// random stream in this crate.
pub(crate) fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the seed of an independent substream from a base seed and a
/// stream tag: `mix64(seed + mix64(tag))`.
pub(crate) fn derive_stream(seed: u64, tag: u64) -> u64 {
    mix64(seed.wrapping_add(mix64(tag)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mix64_spreads_consecutive_inputs() {
        let a = mix64(0);
        let b = mix64(1);
        assert_ne!(a, b);
        assert_ne!(a & 0xFFFF_FFFF, b & 0xFFFF_FFFF);
    }

    #[test]
    fn derived_streams_differ_by_tag() {
        assert_ne!(derive_stream(7, 0), derive_stream(7, 1));
        assert_ne!(derive_stream(7, 0), derive_stream(8, 0));
    }

    #[test]
    fn round_half_up_behaviour() {
        assert_eq!(round_half_up(2.5), 3.0);
        assert_eq!(round_half_up(2.49), 2.0);
        assert_eq!(round_half_up(0.0), 0.0);
    }
}
