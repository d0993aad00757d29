fn main() {
    std::process::exit(weighted_expfam::cli::run(std::env::args_os()));
}
