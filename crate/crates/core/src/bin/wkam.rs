fn main() {
    std::process::exit(wkam_core::cli::run_from(std::env::args_os()));
}
