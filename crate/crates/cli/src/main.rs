fn main() {
    std::process::exit(offlang_cli::run());
}
