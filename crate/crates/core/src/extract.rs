//! Biography lists and hyperlinks from MediaWiki sources.
//!
//! Catalogue pages are read as wikitext (or as an XML export wrapping
//! it); every `*` list item contributes its first main-namespace link.
//! Biography pages come as `Special:Export` XML, one or many `<page>`
//! elements per file.

use std::collections::HashSet;

use quick_xml::events::Event;
use quick_xml::Reader;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, GraphBuilder};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CatalogueEntry {
    pub target_title: String,
    pub display_name: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct CatalogueParse {
    pub entries: Vec<CatalogueEntry>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BiographyDoc {
    pub title: String,
    #[serde(skip)]
    pub raw_text: String,
    /// Normalized main-namespace link targets in document order.
    pub out_links: Vec<String>,
}

/// Namespaces and pseudo-namespaces whose links never point at articles.
const SKIPPED_NAMESPACES: &[&str] = &[
    "file", "image", "media", "category", "wikipedia", "wp", "project", "template", "help",
    "portal", "special", "talk", "user", "user talk", "draft", "module", "mediawiki", "book",
    "timedtext", "wiktionary", "wikt", "wikisource", "s", "wikiquote", "q", "wikibooks", "b",
    "wikiversity", "v", "wikinews", "n", "wikivoyage", "voy", "commons", "meta", "m", "species",
    "wikispecies", "wikidata", "d", "mw", "foundation", "w",
];

/// Canonical form of a page title: underscores and whitespace runs
/// collapsed to one space, trimmed, first character upper-cased. Returns
/// `None` when nothing is left.
pub fn normalize_title(raw: &str) -> Option<String> {
    let mut out = String::with_capacity(raw.len());
    let mut pending_space = false;
    for c in raw.chars() {
        if c == '_' || c.is_whitespace() {
            pending_space = !out.is_empty();
        } else {
            if pending_space {
                out.push(' ');
                pending_space = false;
            }
            out.push(c);
        }
    }
    let mut chars = out.chars();
    let first = chars.next()?;
    Some(first.to_uppercase().chain(chars).collect())
}

fn percent_decode(raw: &str) -> String {
    if !raw.contains('%') {
        return raw.to_owned();
    }
    let bytes = raw.as_bytes();
    let mut out = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'%' && i + 2 < bytes.len() {
            let hex = std::str::from_utf8(&bytes[i + 1..i + 3]).ok();
            if let Some(b) = hex.and_then(|h| u8::from_str_radix(h, 16).ok()) {
                out.push(b);
                i += 3;
                continue;
            }
        }
        out.push(bytes[i]);
        i += 1;
    }
    String::from_utf8(out).unwrap_or_else(|_| raw.to_owned())
}

/// Resolves the target part of a `[[...]]` link to a main-namespace title.
/// URL escapes in the target are decoded first.
pub fn link_target(raw: &str) -> Option<String> {
    let decoded = percent_decode(raw);
    let raw = decoded.trim();
    if raw.contains("://") {
        return None;
    }
    let raw = raw.split('#').next().unwrap_or("");
    let raw = raw.strip_prefix(':').unwrap_or(raw).trim_start();
    if let Some((prefix, _)) = raw.split_once(':') {
        let prefix = prefix.trim();
        let lower = prefix.to_lowercase().replace('_', " ");
        if SKIPPED_NAMESPACES.contains(&lower.as_str()) || is_language_prefix(prefix) {
            return None;
        }
    }
    normalize_title(raw)
}

/// Interlanguage links use lowercase language codes such as `de` or `zh-yue`.
fn is_language_prefix(prefix: &str) -> bool {
    let mut parts = prefix.split('-');
    let head = parts.next().unwrap_or("");
    (2..=3).contains(&head.len())
        && head.bytes().all(|b| b.is_ascii_lowercase())
        && parts.all(|p| !p.is_empty() && p.bytes().all(|b| b.is_ascii_lowercase()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct RawLink<'a> {
    target: &'a str,
    label: Option<&'a str>,
}

/// Finds `[[target]]` and `[[target|label]]` constructs. Scanning resumes
/// right after each opening bracket pair, so links nested in file
/// captions are found too. Returns the links and a count of openings
/// that never close.
fn scan_links(text: &str) -> (Vec<RawLink<'_>>, usize) {
    let mut links = Vec::new();
    let mut malformed = 0;
    let mut pos = 0;
    while let Some(off) = text[pos..].find("[[") {
        let start = pos + off + 2;
        pos = start;
        let rest = &text[start..];
        let end = rest
            .find(|c| c == '|' || c == ']' || c == '[' || c == '\n')
            .unwrap_or(rest.len());
        let target = &rest[..end];
        match rest[end..].chars().next() {
            Some(']') if rest[end..].starts_with("]]") => links.push(RawLink { target, label: None }),
            Some('|') => {
                let after = &rest[end + 1..];
                let stop = after.find(|c| c == '\n' || c == '[' || c == ']').unwrap_or(after.len());
                let label = after[..stop].trim();
                // a label may contain further links; only a plain one is kept
                let closes = after[stop..].starts_with("]]");
                links.push(RawLink {
                    target,
                    label: closes.then_some(label),
                });
            }
            _ => malformed += 1,
        }
    }
    (links, malformed)
}

/// Removes `<!-- -->` comments and `<nowiki>` spans, which never render links.
fn strip_inert(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    loop {
        let comment = rest.find("<!--");
        let nowiki = rest.find("<nowiki>");
        let (at, close) = match (comment, nowiki) {
            (Some(c), Some(n)) if n < c => (n, "</nowiki>"),
            (Some(c), _) => (c, "-->"),
            (None, Some(n)) => (n, "</nowiki>"),
            (None, None) => break,
        };
        out.push_str(&rest[..at]);
        match rest[at..].find(close) {
            Some(end) => rest = &rest[at + end + close.len()..],
            None => {
                rest = "";
                break;
            }
        }
    }
    out.push_str(rest);
    out
}

/// Main-namespace link targets of a wikitext body, order and repeats kept.
pub fn extract_links(wikitext: &str) -> Vec<String> {
    let text = strip_inert(wikitext);
    scan_links(&text)
        .0
        .into_iter()
        .filter_map(|l| link_target(l.target))
        .collect()
}

/// Biography entries of a catalogue page body. Only `*` list items are
/// considered; the first main-namespace link of each item is the entry.
pub fn parse_catalogue(wikitext: &str) -> CatalogueParse {
    let text = strip_inert(wikitext);
    let mut out = CatalogueParse::default();
    for (lineno, line) in text.lines().enumerate() {
        let item = line.trim_start();
        if !item.starts_with('*') {
            continue;
        }
        let (links, malformed) = scan_links(item);
        let entry = links.iter().find_map(|l| {
            link_target(l.target).map(|t| CatalogueEntry {
                display_name: l
                    .label
                    .filter(|s| !s.is_empty())
                    .map_or_else(|| t.clone(), str::to_owned),
                target_title: t,
            })
        });
        match entry {
            Some(e) => out.entries.push(e),
            None if malformed > 0 => out
                .warnings
                .push(format!("line {}: malformed link in {:?}", lineno + 1, item)),
            None => {}
        }
    }
    out
}

/// Catalogue source that may be plain wikitext or an XML page export.
pub fn parse_catalogue_source(source: &str) -> Result<CatalogueParse> {
    if looks_like_xml(source) {
        let mut merged = CatalogueParse::default();
        for page in read_pages(source)? {
            let part = parse_catalogue(&page.text);
            merged.entries.extend(part.entries);
            merged.warnings.extend(part.warnings);
        }
        Ok(merged)
    } else {
        Ok(parse_catalogue(source))
    }
}

fn looks_like_xml(source: &str) -> bool {
    let head = source.trim_start();
    head.starts_with("<?xml") || head.starts_with("<mediawiki") || head.starts_with("<page")
}

struct RawPage {
    title: Option<String>,
    text: String,
    has_text: bool,
}

fn read_pages(xml: &str) -> Result<Vec<RawPage>> {
    #[derive(PartialEq)]
    enum Field {
        None,
        Title,
        Text,
    }
    let mut reader = Reader::from_str(xml);
    let mut pages = Vec::new();
    let mut current: Option<RawPage> = None;
    let mut field = Field::None;
    let mut buf = String::new();
    loop {
        let event = reader.read_event().map_err(|e| Error::Xml(e.to_string()))?;
        match event {
            Event::Start(e) => match e.local_name().as_ref() {
                b"page" => {
                    current = Some(RawPage {
                        title: None,
                        text: String::new(),
                        has_text: false,
                    })
                }
                b"title" if current.is_some() => {
                    field = Field::Title;
                    buf.clear();
                }
                b"text" if current.is_some() => {
                    field = Field::Text;
                    buf.clear();
                }
                _ => {}
            },
            Event::Empty(e) => {
                if e.local_name().as_ref() == b"text" {
                    if let Some(p) = current.as_mut() {
                        p.text.clear();
                        p.has_text = true;
                    }
                }
            }
            Event::Text(t) if field != Field::None => {
                let s = t.unescape().map_err(|e| Error::Xml(e.to_string()))?;
                buf.push_str(&s);
            }
            Event::CData(t) if field != Field::None => {
                buf.push_str(&String::from_utf8_lossy(&t));
            }
            Event::End(e) => match e.local_name().as_ref() {
                b"title" if field == Field::Title => {
                    if let Some(p) = current.as_mut() {
                        p.title = Some(std::mem::take(&mut buf));
                    }
                    field = Field::None;
                }
                b"text" if field == Field::Text => {
                    if let Some(p) = current.as_mut() {
                        // later revisions replace earlier ones
                        p.text = std::mem::take(&mut buf);
                        p.has_text = true;
                    }
                    field = Field::None;
                }
                b"page" => pages.extend(current.take()),
                _ => {}
            },
            Event::Eof => break,
            _ => {}
        }
    }
    Ok(pages)
}

fn into_doc(page: RawPage) -> Result<BiographyDoc> {
    let title = page
        .title
        .as_deref()
        .and_then(normalize_title)
        .ok_or(Error::MissingElement { element: "<title>" })?;
    if !page.has_text {
        return Err(Error::MissingElement { element: "<text>" });
    }
    Ok(BiographyDoc {
        out_links: extract_links(&page.text),
        title,
        raw_text: page.text,
    })
}

/// Parses an export holding a single page.
pub fn parse_links(doc_xml: &str) -> Result<BiographyDoc> {
    let mut pages = read_pages(doc_xml)?;
    if pages.is_empty() {
        return Err(Error::MissingElement { element: "<page>" });
    }
    into_doc(pages.swap_remove(0))
}

/// Parses every page of an export file.
pub fn parse_export(xml: &str) -> Result<Vec<BiographyDoc>> {
    read_pages(xml)?.into_iter().map(into_doc).collect()
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct NetworkManifest {
    pub biographies: usize,
    pub documents: usize,
    /// Biographies without a page document.
    pub missing_documents: Vec<String>,
    /// Link occurrences pointing at any biography, self-links included.
    pub biography_link_occurrences: usize,
    /// Distinct ordered pairs of different biographies with a link.
    pub hyperlinks: usize,
    pub self_links: usize,
    pub edges: usize,
}

/// Undirected network over `biographies`: `{u, v}` is an edge when either
/// page links to the other. Every biography becomes a node, in the given
/// order, whether or not it has links.
pub fn build_network(biographies: &[String], docs: &[BiographyDoc]) -> Result<(Graph, NetworkManifest)> {
    let mut builder = GraphBuilder::new();
    for title in biographies {
        builder.add_node(title);
    }
    let mut seen_docs = HashSet::new();
    let mut directed = HashSet::new();
    let mut manifest = NetworkManifest {
        documents: docs.len(),
        ..Default::default()
    };
    for doc in docs {
        let from = builder.node_id(&doc.title).ok_or_else(|| Error::NotABiography {
            title: doc.title.clone(),
        })?;
        seen_docs.insert(from);
        for link in &doc.out_links {
            let Some(to) = builder.node_id(link) else {
                continue;
            };
            manifest.biography_link_occurrences += 1;
            if to == from {
                manifest.self_links += 1;
                continue;
            }
            if directed.insert((from, to)) {
                builder.add_edge(from, to);
            }
        }
    }
    let (graph, _) = builder.build();
    manifest.biographies = graph.node_count();
    manifest.hyperlinks = directed.len();
    manifest.edges = graph.edge_count();
    manifest.missing_documents = graph
        .nodes()
        .filter(|v| !seen_docs.contains(v))
        .map(|v| graph.label(v).to_owned())
        .collect();
    Ok((graph, manifest))
}

/// Catalogue entries merged across pages, first occurrence wins.
pub fn biography_titles<'a>(entries: impl IntoIterator<Item = &'a CatalogueEntry>) -> Vec<String> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for e in entries {
        if seen.insert(e.target_title.clone()) {
            out.push(e.target_title.clone());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn export(title: &str, text: &str) -> String {
        format!(
            "<mediawiki><page><title>{title}</title><ns>0</ns><revision><text xml:space=\"preserve\">{text}</text></revision></page></mediawiki>"
        )
    }

    #[test]
    fn catalogue_piped_entry() {
        let parsed = parse_catalogue("* [[Odd Aalen|Aalen, Odd]] (born 1947)");
        assert_eq!(
            parsed.entries,
            vec![CatalogueEntry {
                target_title: "Odd Aalen".into(),
                display_name: "Aalen, Odd".into()
            }]
        );
    }

    #[test]
    fn catalogue_list_items_only() {
        let parsed = parse_catalogue("* [[A]]\n* [[B]]");
        let titles: Vec<_> = parsed.entries.iter().map(|e| e.target_title.as_str()).collect();
        assert_eq!(titles, ["A", "B"]);
        assert!(parse_catalogue("See also [[List of physicists]]").entries.is_empty());
    }

    #[test]
    fn catalogue_malformed_entry_warns() {
        let parsed = parse_catalogue("* [[Good]]\n* [[Broken entry\n* [[Fine|Fine, X]]");
        assert_eq!(parsed.entries.len(), 2);
        assert_eq!(parsed.warnings.len(), 1);
    }

    #[test]
    fn catalogue_skips_namespace_links_in_item() {
        let parsed = parse_catalogue("* [[File:X.png]] [[Niels Henrik Abel|Abel, Niels Henrik]]");
        assert_eq!(parsed.entries[0].target_title, "Niels Henrik Abel");
    }

    #[test]
    fn links_piped_and_plain() {
        let doc = parse_links(&export("Test", "see [[Isaac Newton|Newton]] and [[Hilbert space]]")).unwrap();
        assert_eq!(doc.out_links, ["Isaac Newton", "Hilbert space"]);
    }

    #[test]
    fn links_fragment_and_underscores() {
        assert_eq!(extract_links("[[David_Hilbert#Work]]"), ["David Hilbert"]);
    }

    #[test]
    fn links_namespace_filter() {
        assert!(extract_links("[[File:Newton.jpg]] [[Category:Mathematicians]]").is_empty());
        assert!(extract_links("[[:Category:X]] [[de:Isaac Newton]] [[wikt:prime]]").is_empty());
        assert!(extract_links("[http://example.org external]").is_empty());
    }

    #[test]
    fn links_inside_file_captions() {
        let links = extract_links("[[File:Newton.jpg|thumb|Portrait by [[Godfrey Kneller]], 1689]]");
        assert_eq!(links, ["Godfrey Kneller"]);
    }

    #[test]
    fn links_in_comments_ignored() {
        assert_eq!(extract_links("<!-- [[Hidden]] --> [[Shown]] <nowiki>[[Nope]]</nowiki>"), ["Shown"]);
    }

    #[test]
    fn lowercase_first_letter_and_escapes() {
        assert_eq!(extract_links("[[euclid]] [[Emmy%20Noether]]"), ["Euclid", "Emmy Noether"]);
        let doc = parse_links(&export("G._H._Hardy", "[[Ramanujan &amp; Hardy]]")).unwrap();
        assert_eq!(doc.title, "G. H. Hardy");
        assert_eq!(doc.out_links, ["Ramanujan & Hardy"]);
    }

    #[test]
    fn missing_elements_are_named() {
        let err = parse_links("<mediawiki><page><title>A</title></page></mediawiki>").unwrap_err();
        assert!(err.to_string().contains("<text>"));
        let err = parse_links("<mediawiki><page><text>x</text></page></mediawiki>").unwrap_err();
        assert!(err.to_string().contains("<title>"));
    }

    #[test]
    fn export_with_many_pages() {
        let xml = "<mediawiki><page><title>A</title><revision><text>[[B]]</text></revision></page>\
                   <page><title>B</title><revision><text/></revision></page></mediawiki>";
        let docs = parse_export(xml).unwrap();
        assert_eq!(docs.len(), 2);
        assert!(docs[1].out_links.is_empty());
    }

    fn doc(title: &str, links: &[&str]) -> BiographyDoc {
        BiographyDoc {
            title: title.into(),
            raw_text: String::new(),
            out_links: links.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn titles(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn repeated_links_collapse() {
        let (g, m) = build_network(&titles(&["A", "B"]), &[doc("A", &["B"; 5])]).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(m.biography_link_occurrences, 5);
        assert_eq!(m.hyperlinks, 1);
    }

    #[test]
    fn self_link_gives_no_edge() {
        let (g, m) = build_network(&titles(&["A"]), &[doc("A", &["A"])]).unwrap();
        assert_eq!(g.edge_count(), 0);
        assert_eq!(m.self_links, 1);
    }

    #[test]
    fn union_of_directed_links() {
        let bios = titles(&["A", "B", "C"]);
        let (g, _) = build_network(&bios, &[doc("A", &["B", "Outside"]), doc("C", &["A"])]).unwrap();
        let edges: Vec<_> = g.edges().map(|(u, v)| (g.label(u), g.label(v))).collect();
        assert_eq!(edges, [("A", "B"), ("A", "C")]);
        assert_eq!(g.node_count(), 3);
    }

    #[test]
    fn foreign_document_rejected() {
        let err = build_network(&titles(&["A"]), &[doc("Z", &[])]).unwrap_err();
        assert!(matches!(err, Error::NotABiography { .. }));
    }

    proptest::proptest! {
        #[test]
        fn normalization_is_idempotent(raw in "[ _a-zA-Z%0-9éß.\t-]{0,24}") {
            if let Some(once) = normalize_title(&raw) {
                proptest::prop_assert_eq!(normalize_title(&once), Some(once.clone()));
            }
        }

        #[test]
        fn link_direction_does_not_matter(pairs in proptest::collection::vec((0usize..6, 0usize..6), 0..20)) {
            let bios: Vec<String> = (0..6).map(|i| format!("P{i}")).collect();
            let forward: Vec<BiographyDoc> = (0..6)
                .map(|i| BiographyDoc {
                    title: bios[i].clone(),
                    raw_text: String::new(),
                    out_links: pairs.iter().filter(|p| p.0 == i).map(|p| bios[p.1].clone()).collect(),
                })
                .collect();
            let backward: Vec<BiographyDoc> = (0..6)
                .map(|i| BiographyDoc {
                    title: bios[i].clone(),
                    raw_text: String::new(),
                    out_links: pairs.iter().filter(|p| p.1 == i).map(|p| bios[p.0].clone()).collect(),
                })
                .collect();
            let (a, _) = build_network(&bios, &forward).unwrap();
            let (b, _) = build_network(&bios, &backward).unwrap();
            proptest::prop_assert_eq!(a.node_count(), bios.len());
            proptest::prop_assert_eq!(a.edges().collect::<Vec<_>>(), b.edges().collect::<Vec<_>>());
        }
    }
}
