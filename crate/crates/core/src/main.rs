fn main() {
    if let Err(error) = protsrc::cli::run() {
        eprintln!("error: {error}");
        std::process::exit(1);
    }
}
