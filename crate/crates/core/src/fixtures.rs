//! Shipped fixture nets and logs, embedded at compile time.

use crate::eventlog::EventLog;
use crate::procmodel::{Model, Net};

pub const NETS: &[(&str, &str)] = &[
    ("dup_choice", include_str!("../fixtures/dup_choice.net")),
    ("flower", include_str!("../fixtures/flower.net")),
    ("m1", include_str!("../fixtures/m1.net")),
    ("m10", include_str!("../fixtures/m10.net")),
    ("m11", include_str!("../fixtures/m11.net")),
    ("m1_se", include_str!("../fixtures/m1_se.net")),
    ("m2", include_str!("../fixtures/m2.net")),
    ("m3", include_str!("../fixtures/m3.net")),
    ("m4", include_str!("../fixtures/m4.net")),
    ("m5", include_str!("../fixtures/m5.net")),
    ("m6", include_str!("../fixtures/m6.net")),
    ("m7", include_str!("../fixtures/m7.net")),
    ("m8", include_str!("../fixtures/m8.net")),
    ("m8_dup", include_str!("../fixtures/m8_dup.net")),
    ("m9", include_str!("../fixtures/m9.net")),
    ("m_cloop", include_str!("../fixtures/m_cloop.net")),
];

pub const LOGS: &[(&str, &str)] = &[
    ("l10", include_str!("../fixtures/l10.log")),
    ("l11", include_str!("../fixtures/l11.log")),
    ("l12", include_str!("../fixtures/l12.log")),
    ("l12_loop", include_str!("../fixtures/l12_loop.log")),
    ("l13", include_str!("../fixtures/l13.log")),
    ("l14", include_str!("../fixtures/l14.log")),
    ("l15", include_str!("../fixtures/l15.log")),
    ("l16", include_str!("../fixtures/l16.log")),
    ("l16_etc", include_str!("../fixtures/l16_etc.log")),
    ("l17", include_str!("../fixtures/l17.log")),
    ("l18", include_str!("../fixtures/l18.log")),
    ("l19", include_str!("../fixtures/l19.log")),
    ("l3", include_str!("../fixtures/l3.log")),
    ("l4", include_str!("../fixtures/l4.log")),
    ("l7", include_str!("../fixtures/l7.log")),
    ("l8", include_str!("../fixtures/l8.log")),
    ("l9", include_str!("../fixtures/l9.log")),
];

pub fn net_source(name: &str) -> Option<&'static str> {
    NETS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn log_source(name: &str) -> Option<&'static str> {
    LOGS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

/// Parsed fixture net. Panics on an unknown name.
pub fn net(name: &str) -> Net {
    let src = net_source(name).unwrap_or_else(|| panic!("no fixture net `{name}`"));
    Net::parse(src).unwrap_or_else(|e| panic!("fixture net `{name}`: {e}"))
}

pub fn model(name: &str) -> Model {
    Model::from_net(net(name))
}

/// Parsed fixture log. Panics on an unknown name.
pub fn log(name: &str) -> EventLog {
    let src = log_source(name).unwrap_or_else(|| panic!("no fixture log `{name}`"));
    EventLog::parse(src).unwrap_or_else(|e| panic!("fixture log `{name}`: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_fixtures_parse() {
        for (n, _) in NETS {
            let m = model(n);
            m.dfa().unwrap();
        }
        for (n, _) in LOGS {
            assert!(!log(n).is_empty());
        }
    }
}
