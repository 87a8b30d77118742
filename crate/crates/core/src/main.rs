fn main() {
    std::process::exit(lognls_core::cli::run(std::env::args_os()));
}
