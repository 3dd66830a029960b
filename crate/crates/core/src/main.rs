fn main() {
    std::process::exit(tangencies::cli::run());
}
