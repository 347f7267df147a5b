fn main() {
    std::process::exit(gauss_hardy::cli::run(std::env::args_os()));
}
