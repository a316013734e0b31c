use std::fmt::Write as _;

use super::Net;

const PNML_NS: &str = "http://www.pnml.org/version-2009/grammar/pnml";
const PTNET: &str = "http://www.pnml.org/version-2009/grammar/ptnet";

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Exports a net as a PNML P/T-net document with one page.
///
/// Initial markings are written only for marked places; coordinates become
/// `<graphics><position/>` annotations.
pub fn export_pnml(net: &Net) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(out, "<pnml xmlns=\"{PNML_NS}\">");
    let name = escape(net.name());
    let _ = writeln!(out, "  <net id=\"{name}\" type=\"{PTNET}\">");
    let _ = writeln!(out, "    <name><text>{name}</text></name>");
    out.push_str("    <page id=\"page0\">\n");
    for p in net.places() {
        let id = escape(&p.id);
        let _ = writeln!(out, "      <place id=\"{id}\">");
        let _ = writeln!(out, "        <name><text>{id}</text></name>");
        if let Some(c) = p.coord {
            let _ = writeln!(
                out,
                "        <graphics><position x=\"{}\" y=\"{}\"/></graphics>",
                c.x, c.y
            );
        }
        if p.initial {
            out.push_str("        <initialMarking><text>1</text></initialMarking>\n");
        }
        out.push_str("      </place>\n");
    }
    for t in net.transitions() {
        let id = escape(&t.id);
        let _ = writeln!(out, "      <transition id=\"{id}\">");
        let _ = writeln!(out, "        <name><text>{id}</text></name>");
        if let Some(c) = t.coord {
            let _ = writeln!(
                out,
                "        <graphics><position x=\"{}\" y=\"{}\"/></graphics>",
                c.x, c.y
            );
        }
        out.push_str("      </transition>\n");
    }
    let mut arc = 0;
    for (t, tr) in net.transitions().iter().enumerate() {
        let tid = escape(&tr.id);
        for &p in net.pre(t) {
            let pid = escape(&net.place(p).id);
            let _ = writeln!(out, "      <arc id=\"a{arc}\" source=\"{pid}\" target=\"{tid}\"/>");
            arc += 1;
        }
        for &p in net.post(t) {
            let pid = escape(&net.place(p).id);
            let _ = writeln!(out, "      <arc id=\"a{arc}\" source=\"{tid}\" target=\"{pid}\"/>");
            arc += 1;
        }
    }
    out.push_str("    </page>\n  </net>\n</pnml>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::{Coord, Place, Transition};

    #[test]
    fn single_place() {
        let net = Net::new(
            "one",
            vec![Place::new("p").marked()],
            vec![Transition::new("t")],
            &[("t", &["p"], &[])],
        )
        .unwrap();
        let xml = export_pnml(&net);
        assert_eq!(xml.matches("<place ").count(), 1);
        assert!(xml.contains("<initialMarking><text>1</text></initialMarking>"));
        assert!(!xml.contains("<graphics>"));
    }

    #[test]
    fn coordinates_become_graphics() {
        let mut net = Net::new(
            "one",
            vec![Place::new("p")],
            vec![Transition::new("t")],
            &[("t", &[], &["p"])],
        )
        .unwrap();
        net.set_coord(crate::net::Node::Place(0), Some(Coord::new(3.0, 4.5)));
        let xml = export_pnml(&net);
        assert!(xml.contains("<position x=\"3\" y=\"4.5\"/>"));
    }
}
