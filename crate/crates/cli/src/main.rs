fn main() {
    std::process::exit(gcdqp_cli::run(std::env::args_os()));
}
