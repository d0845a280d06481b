//! JSON Lines serialization: one playthrough object per line.

use super::{DataError, Dataset, Playthrough};

/// Parse a JSONL dataset. Blank lines are skipped; errors report 1-based
/// line numbers.
pub fn parse_dataset(text: &str) -> Result<Dataset, DataError> {
    let mut playthroughs = Vec::new();
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let p: Playthrough = serde_json::from_str(raw)
            .map_err(|e| DataError::Json { line, message: e.to_string() })?;
        playthroughs.push(p);
        lines.push(line);
    }
    Dataset::with_line_numbers(playthroughs, &lines)
}

/// Serialize to JSONL, one line per playthrough, trailing newline included.
pub fn serialize_dataset(dataset: &Dataset) -> String {
    let mut out = String::new();
    for p in dataset.playthroughs() {
        out.push_str(&serde_json::to_string(p).expect("playthrough serializes"));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::model::fixtures::playthrough;

    const ONE_LINE: &str = r#"{"player_id":"p1","level":1,"turns":[
        {"turn":0,"total_votes":10,"budget":100,"duration_s":30,"districts":[
            {"id":1,"population":500,"favorability":3,"unregistered":0.1,"undecided":0.2,"for":0.3,"against":0.4,"actions":{"rally":0}},
            {"id":2,"population":500,"favorability":3,"unregistered":0.1,"undecided":0.2,"for":0.3,"against":0.4,"actions":{"rally":1}},
            {"id":3,"population":500,"favorability":3,"unregistered":0.1,"undecided":0.2,"for":0.3,"against":0.4,"actions":{"rally":0}},
            {"id":4,"population":500,"favorability":3,"unregistered":0.1,"undecided":0.2,"for":0.3,"against":0.4,"actions":{"rally":0}}]},
        {"turn":1,"total_votes":12,"budget":90,"duration_s":31,"districts":[
            {"id":1,"population":500,"favorability":3,"unregistered":0.1,"undecided":0.2,"for":0.3,"against":0.4,"actions":{"rally":0}},
            {"id":2,"population":500,"favorability":3,"unregistered":0.1,"undecided":0.2,"for":0.3,"against":0.4,"actions":{"rally":0}},
            {"id":3,"population":500,"favorability":3,"unregistered":0.1,"undecided":0.2,"for":0.3,"against":0.4,"actions":{"rally":0}},
            {"id":4,"population":500,"favorability":3,"unregistered":0.1,"undecided":0.2,"for":0.3,"against":0.4,"actions":{"rally":0}}]},
        {"turn":2,"total_votes":15,"budget":80,"duration_s":29,"districts":[
            {"id":1,"population":500,"favorability":3,"unregistered":0.1,"undecided":0.2,"for":0.3,"against":0.4,"actions":{"rally":0}},
            {"id":2,"population":500,"favorability":3,"unregistered":0.1,"undecided":0.2,"for":0.3,"against":0.4,"actions":{"rally":0}},
            {"id":3,"population":500,"favorability":3,"unregistered":0.1,"undecided":0.2,"for":0.3,"against":0.4,"actions":{"rally":0}},
            {"id":4,"population":500,"favorability":3,"unregistered":0.1,"undecided":0.2,"for":0.3,"against":0.4,"actions":{"rally":1}}]}]}"#;

    fn one_line() -> String {
        ONE_LINE.lines().map(str::trim).collect()
    }

    #[test]
    fn parses_one_playthrough() {
        let ds = parse_dataset(&one_line()).unwrap();
        assert_eq!(ds.district_count(), 4);
        assert_eq!(ds.playthroughs().len(), 1);
        assert_eq!(ds.playthroughs()[0].turns.len(), 3);
        assert_eq!(ds.action_vocabulary(), ["rally"]);
    }

    #[test]
    fn fraction_error_names_field_and_line() {
        let text = one_line().replacen("\"for\":0.3", "\"for\":1.3", 1);
        let err = parse_dataset(&text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 1"), "{msg}");
        assert!(msg.contains(".for"), "{msg}");
        assert_eq!(err.line(), Some(1));
    }

    #[test]
    fn malformed_json_reports_line() {
        let text = format!("{}\n\n{{\"player_id\": 3", one_line());
        let err = parse_dataset(&text).unwrap_err();
        assert!(matches!(err, DataError::Json { line: 3, .. }), "{err}");
    }

    #[test]
    fn empty_input_has_no_playthroughs() {
        let err = parse_dataset("\n  \n").unwrap_err();
        assert_eq!(err.to_string(), "no playthroughs");
    }

    #[test]
    fn round_trip() {
        let ds = Dataset::new(vec![playthrough("a", 3, 4), playthrough("b", 5, 4)]).unwrap();
        let text = serialize_dataset(&ds);
        assert_eq!(text.lines().count(), 2);
        assert_eq!(parse_dataset(&text).unwrap(), ds);
    }
}
