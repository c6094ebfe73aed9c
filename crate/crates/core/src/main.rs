fn main() {
    std::process::exit(braidlab::cli::cli_main());
}
