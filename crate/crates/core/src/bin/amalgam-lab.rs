fn main() {
    std::process::exit(amalgam_lab::cli::run(std::env::args_os()));
}
