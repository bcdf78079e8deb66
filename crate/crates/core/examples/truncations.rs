//! Truncations, free extensions and the JSON document format.

use operad_forge::document::OperadDocument;
use operad_forge::fixtures;
use operad_forge::operad::free::extend_freely;

fn main() {
    let p = fixtures::com(3);
    let pushed = p.extend_by_zero(5);
    assert_eq!(pushed.truncate(3), p);
    println!("t_* com3 through arity 5: {:?}", pushed.dims());

    let ext = extend_freely(&p, 5);
    ext.operad.validate().unwrap();
    println!("t_! com3 through arity 5: {:?}", ext.operad.dims());

    let text = OperadDocument::from_operad(&p, Some("com3")).to_text();
    let back = OperadDocument::parse(&text).unwrap().to_operad().unwrap();
    assert_eq!(back, p);
    println!("{text}");
}
