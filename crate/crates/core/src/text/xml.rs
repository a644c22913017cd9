use std::fmt::Write;

use super::AnnotatedDocument;

/// Serializes a document and its annotations.
///
/// ```text
/// <document id=".." title="..">
///   <text><![CDATA[...]]></text>
///   <annotations>
///     <annotation id="1" type="Lookup" start="0" end="3">
///       <feature name="URI" value=".."/>
///     </annotation>
///   </annotations>
/// </document>
/// ```
///
/// Annotations appear in id order and features in name order, so identical
/// documents always produce identical bytes.
pub fn export_annotations_xml(doc: &AnnotatedDocument) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(out, "<document id=\"{}\" title=\"{}\">", attr(&doc.doc_id), attr(&doc.title));
    let _ = writeln!(out, "  <text>{}</text>", cdata(doc.text()));

    let mut annotations: Vec<_> = doc.annotations().iter().collect();
    annotations.sort_by_key(|a| a.id);
    if annotations.is_empty() {
        out.push_str("  <annotations/>\n");
    } else {
        out.push_str("  <annotations>\n");
        for ann in annotations {
            let _ = write!(
                out,
                "    <annotation id=\"{}\" type=\"{}\" start=\"{}\" end=\"{}\"",
                ann.id,
                attr(&ann.type_name),
                ann.span.start,
                ann.span.end
            );
            if ann.features.is_empty() {
                out.push_str("/>\n");
                continue;
            }
            out.push_str(">\n");
            for (name, value) in &ann.features {
                let _ =
                    writeln!(out, "      <feature name=\"{}\" value=\"{}\"/>", attr(name), attr(&value.to_string()));
            }
            out.push_str("    </annotation>\n");
        }
        out.push_str("  </annotations>\n");
    }
    out.push_str("</document>\n");
    out
}

fn xml_char(c: char) -> char {
    match c {
        '\t' | '\n' | '\r' => c,
        c if (c as u32) < 0x20 || c == '\u{FFFE}' || c == '\u{FFFF}' => '\u{FFFD}',
        c => c,
    }
}

fn attr(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars().map(xml_char) {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\n' => out.push_str("&#10;"),
            '\r' => out.push_str("&#13;"),
            '\t' => out.push_str("&#9;"),
            c => out.push(c),
        }
    }
    out
}

fn cdata(s: &str) -> String {
    let body: String = s.chars().map(xml_char).collect();
    format!("<![CDATA[{}]]>", body.replace("]]>", "]]]]><![CDATA[>"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::{Annotation, Features, Span};

    #[test]
    fn empty_annotation_list() {
        let doc = AnnotatedDocument::new("d1", "T", "text");
        let xml = export_annotations_xml(&doc);
        assert!(xml.contains("<annotations/>"));
        assert!(xml.contains("<![CDATA[text]]>"));
    }

    #[test]
    fn escapes_attributes_and_cdata_terminator() {
        let mut doc = AnnotatedDocument::new("a&b", "\"q\"", "x ]]> y");
        let mut features = Features::new();
        features.insert("URI".into(), "http://x/<a>".into());
        doc.merge([Annotation { id: 0, type_name: "Lookup".into(), span: Span::new(0, 1), features }]);
        let xml = export_annotations_xml(&doc);
        assert!(xml.contains("id=\"a&amp;b\" title=\"&quot;q&quot;\""));
        assert!(xml.contains("<![CDATA[x ]]]]><![CDATA[> y]]>"));
        assert!(xml.contains("<annotation id=\"1\" type=\"Lookup\" start=\"0\" end=\"1\">"));
        assert!(xml.contains("<feature name=\"URI\" value=\"http://x/&lt;a&gt;\"/>"));
    }
}
