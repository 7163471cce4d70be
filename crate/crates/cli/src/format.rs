/// `x` rounded to 12 significant digits, printed in the shortest form that
/// reads back as the rounded value. Scientific notation outside `[1e-6, 1e12)`.
pub fn num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    let magnitude = rounded.abs();
    if (1e-6..1e12).contains(&magnitude) {
        rounded.to_string()
    } else {
        format!("{rounded:e}")
    }
}

/// `num` of a bound, flagged when it carries no information.
pub fn bound(value: f64, vacuous: bool) -> String {
    if vacuous {
        format!("{} (VACUOUS)", num(value))
    } else {
        num(value)
    }
}
