fn main() {
    std::process::exit(bwar::cli::parse_and_run(std::env::args_os()));
}
