//! Offline look at the built-in prompts: what gets sent for a headline and
//! how replies map to labels. No network access is needed.

use newsratio::classify::PromptTemplate;

fn main() {
    for id in PromptTemplate::builtin_ids() {
        let t = PromptTemplate::builtin(id).unwrap();
        println!("--- {id}\n{}\n", t.render("Fed signals slower pace of rate hikes"));
    }
    let t = PromptTemplate::builtin("baseline").unwrap();
    for reply in ["GOING UP", " going down\n", "It depends", ""] {
        println!("{reply:?} -> {}", t.parse_response(reply).as_str());
    }
}
