fn main() {
    std::process::exit(augbound::cli::run(std::env::args_os()));
}
