fn main() {
    std::process::exit(credibility::cli::run(std::env::args_os()));
}
