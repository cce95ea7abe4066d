fn main() {
    std::process::exit(clockscatter::cli::run(std::env::args_os()));
}
