//! Configurations shipped inside the binary.

pub const PRESETS: &[(&str, &str)] = &[
    ("ordinary-chisq-laplace", include_str!("../presets/ordinary-chisq-laplace.conf")),
    ("kde-rate-gauss", include_str!("../presets/kde-rate-gauss.conf")),
    ("supersmooth-laplace-gauss", include_str!("../presets/supersmooth-laplace-gauss.conf")),
    ("supersmooth-est-diagonal", include_str!("../presets/supersmooth-est-diagonal.conf")),
    ("m-rate-oracle", include_str!("../presets/m-rate-oracle.conf")),
    ("audit-chisq-poly", include_str!("../presets/audit-chisq-poly.conf")),
    ("audit-laplace-log", include_str!("../presets/audit-laplace-log.conf")),
];

pub fn preset(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

pub fn names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(n, _)| *n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Config;
    use crate::scenario;

    #[test]
    fn every_preset_parses() {
        for (name, text) in PRESETS {
            let c = Config::parse(text).unwrap_or_else(|e| panic!("{name}: {e}"));
            if name.starts_with("audit-") {
                scenario::audit(&c).unwrap_or_else(|e| panic!("{name}: {e}"));
            } else {
                scenario::simulation(&c).unwrap_or_else(|e| panic!("{name}: {e}"));
            }
        }
        assert!(preset("nope").is_none());
    }
}
