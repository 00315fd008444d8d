pub const PRESETS: &[(&str, &str)] = &[
    ("fig2", include_str!("../configs/fig2.conf")),
    ("fig3", include_str!("../configs/fig3.conf")),
    ("fig4", include_str!("../configs/fig4.conf")),
    ("fig5", include_str!("../configs/fig5.conf")),
    ("fig6", include_str!("../configs/fig6.conf")),
    ("beta-modes", include_str!("../configs/beta-modes.conf")),
];

pub fn preset(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_parse() {
        for (name, text) in PRESETS {
            let grid = gslond::sim::parse_grid(text).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert!(!grid.is_empty(), "{name}");
        }
    }
}
