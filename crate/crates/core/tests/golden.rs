//! Byte-for-byte comparison against the checked-in golden documents.
//! Set `UPDATE_GOLDEN=1` to rewrite them after an intended format change.

mod common;

#[test]
fn golden_documents_match() {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    for (name, text) in common::golden_documents() {
        let path = common::golden_path(&name);
        if update {
            std::fs::create_dir_all(path.parent().unwrap()).unwrap();
            std::fs::write(&path, &text).unwrap();
            continue;
        }
        let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(text, expected, "{name} differs from its golden copy");
    }
}
